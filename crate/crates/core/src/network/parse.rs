//! Line-oriented network text format.
//!
//! ```text
//! species: X Y Z
//! vertex v1: stoich = 0, kinetic = -3 Z
//! vertex v2: stoich = X, kinetic = X
//! edge v1 -> v2 : k = 1.0
//! edge v2 <-> v3 : k = 2, 0.5
//! ```
//!
//! `#` starts a comment. Complexes are sums of `coefficient species` terms;
//! a missing coefficient means 1 and `0` is the empty complex. `kinetic` may
//! be left out at vertices without outgoing edges, `k` may be left out on any
//! edge.

use std::collections::HashMap;
use std::fmt::Write;

use super::{ComplexPair, Edge, GmasNetwork, RateAssignment, Vertex};
use crate::error::{Error, Result};

/// A parsed file: the network plus whatever rate constants it declared.
#[derive(Clone, Debug, PartialEq)]
pub struct NetworkFile {
    pub network: GmasNetwork,
    /// Per edge, in edge order.
    pub rates: Vec<Option<f64>>,
}

impl NetworkFile {
    /// The declared rates, if every edge has one.
    pub fn rates(&self) -> Option<RateAssignment> {
        let k: Option<Vec<f64>> = self.rates.iter().copied().collect();
        k.and_then(|k| RateAssignment::new(k).ok())
    }
}

pub fn parse_network(text: &str) -> Result<GmasNetwork> {
    parse_network_file(text).map(|f| f.network)
}

pub fn parse_network_file(text: &str) -> Result<NetworkFile> {
    let mut species: Option<Vec<String>> = None;
    let mut vertices: Vec<Vertex> = Vec::new();
    let mut vertex_lines: Vec<usize> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut rates: Vec<Option<f64>> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let lineno = lineno + 1;
        let content = raw.split('#').next().unwrap_or("");
        let tokens = tokenize(content, lineno)?;
        if tokens.is_empty() {
            continue;
        }
        let mut p = Cursor { tokens: &tokens, pos: 0, line: lineno, len: content.len() };
        let keyword = p.ident()?;
        match keyword.as_str() {
            "species" => {
                if species.is_some() {
                    return Err(p.error_at(0, "species declared twice"));
                }
                p.expect(&Tok::Colon)?;
                let mut names = Vec::new();
                while !p.at_end() {
                    names.push(p.ident()?);
                }
                if names.is_empty() {
                    return Err(p.error_here("expected at least one species name"));
                }
                species = Some(names);
            }
            "vertex" => {
                let Some(species) = species.as_ref() else {
                    return Err(p.error_at(0, "`species:` must come before the first vertex"));
                };
                let name = p.ident()?;
                p.expect(&Tok::Colon)?;
                p.keyword("stoich")?;
                p.expect(&Tok::Eq)?;
                let stoich = p.complex(species)?;
                let kinetic = if p.eat(&Tok::Comma) {
                    p.keyword("kinetic")?;
                    p.expect(&Tok::Eq)?;
                    Some(p.complex(species)?)
                } else {
                    None
                };
                p.finish()?;
                if stoich.iter().any(|c| *c < 0.0) {
                    return Err(Error::InvalidNetwork(format!(
                        "line {lineno}: stoichiometric complex of `{name}` has a negative coefficient"
                    )));
                }
                if vertices.iter().any(|v| v.name == name) {
                    return Err(Error::InvalidNetwork(format!("line {lineno}: vertex `{name}` declared twice")));
                }
                vertices.push(Vertex { name, complex: ComplexPair { stoich, kinetic } });
                vertex_lines.push(lineno);
            }
            "edge" => {
                let name_col = p.column();
                let from = p.ident()?;
                let reversible = match p.next_tok() {
                    Some(Tok::Arrow) => false,
                    Some(Tok::BiArrow) => true,
                    _ => return Err(p.error_prev("expected `->` or `<->`")),
                };
                let to = p.ident()?;
                let mut k = Vec::new();
                if p.eat(&Tok::Colon) {
                    p.keyword("k")?;
                    p.expect(&Tok::Eq)?;
                    k.push(p.number()?);
                    if reversible {
                        p.expect(&Tok::Comma)?;
                        k.push(p.number()?);
                    }
                }
                p.finish()?;
                let lookup = |name: &str| {
                    vertices.iter().position(|v| v.name == name).ok_or_else(|| Error::Syntax {
                        line: lineno,
                        column: name_col,
                        message: format!("undeclared vertex `{name}`"),
                    })
                };
                let a = lookup(&from)?;
                let b = lookup(&to)?;
                let mut push = |source: usize, target: usize, rate: Option<f64>| -> Result<()> {
                    if let Some(r) = rate {
                        if !(r.is_finite() && r > 0.0) {
                            return Err(Error::NonPositive { what: "rate constants" });
                        }
                    }
                    edges.push(Edge { source, target });
                    rates.push(rate);
                    Ok(())
                };
                push(a, b, k.first().copied())?;
                if reversible {
                    push(b, a, k.get(1).copied())?;
                }
            }
            other => {
                return Err(Error::Syntax {
                    line: lineno,
                    column: tokens[0].col,
                    message: format!("unknown declaration `{other}`"),
                })
            }
        }
    }

    let species = species.unwrap_or_default();
    let network = GmasNetwork::new(species, vertices, edges)?;
    Ok(NetworkFile { network, rates })
}

/// Canonical text form. Edges are written one per line; `k` is written only
/// when `rates` is given.
pub fn to_text(net: &GmasNetwork, rates: Option<&RateAssignment>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "species: {}", net.species().join(" "));
    for v in net.vertices() {
        let _ = write!(out, "vertex {}: stoich = {}", v.name, format_complex(&v.complex.stoich, net.species()));
        if let Some(k) = &v.complex.kinetic {
            let _ = write!(out, ", kinetic = {}", format_complex(k, net.species()));
        }
        out.push('\n');
    }
    for (j, e) in net.edges().iter().enumerate() {
        let _ = write!(out, "edge {} -> {}", net.vertices()[e.source].name, net.vertices()[e.target].name);
        if let Some(k) = rates {
            let _ = write!(out, " : k = {:?}", k.as_slice()[j]);
        }
        out.push('\n');
    }
    out
}

fn format_complex(c: &[f64], species: &[String]) -> String {
    let mut s = String::new();
    for (coef, name) in c.iter().zip(species) {
        if *coef == 0.0 {
            continue;
        }
        let mag = coef.abs();
        if s.is_empty() {
            if *coef < 0.0 {
                s.push('-');
            }
        } else {
            s.push_str(if *coef < 0.0 { " - " } else { " + " });
        }
        if mag != 1.0 {
            let _ = write!(s, "{mag:?} ");
        }
        s.push_str(name);
    }
    if s.is_empty() {
        s.push('0');
    }
    s
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Ident(String),
    Number(f64),
    Colon,
    Comma,
    Eq,
    Plus,
    Minus,
    Star,
    Arrow,
    BiArrow,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    col: usize,
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>> {
    let bytes = line.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            ':' => Some(Tok::Colon),
            ',' => Some(Tok::Comma),
            '=' => Some(Tok::Eq),
            '+' => Some(Tok::Plus),
            '*' => Some(Tok::Star),
            _ => None,
        };
        if let Some(tok) = single {
            out.push(Token { tok, col });
            i += 1;
        } else if line[i..].starts_with("<->") {
            out.push(Token { tok: Tok::BiArrow, col });
            i += 3;
        } else if line[i..].starts_with("->") {
            out.push(Token { tok: Tok::Arrow, col });
            i += 2;
        } else if c == '-' {
            out.push(Token { tok: Tok::Minus, col });
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    i = j;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text = &line[start..i];
            let value = text.parse::<f64>().map_err(|_| Error::Syntax {
                line: lineno,
                column: col,
                message: format!("malformed number `{text}`"),
            })?;
            out.push(Token { tok: Tok::Number(value), col });
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(line[start..i].to_string()), col });
        } else {
            return Err(Error::Syntax { line: lineno, column: col, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    tokens: &'a [Token],
    pos: usize,
    line: usize,
    len: usize,
}

impl Cursor<'_> {
    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len + 1, |t| t.col)
    }

    fn peek(&self) -> Option<&Tok> {
        self.tokens.get(self.pos).map(|t| &t.tok)
    }

    fn next_tok(&mut self) -> Option<Tok> {
        let t = self.tokens.get(self.pos).map(|t| t.tok.clone());
        self.pos += 1;
        t
    }

    fn error_here(&self, msg: &str) -> Error {
        Error::Syntax { line: self.line, column: self.column(), message: msg.to_string() }
    }

    fn error_prev(&self, msg: &str) -> Error {
        let col = self.tokens.get(self.pos.saturating_sub(1)).map_or(self.len + 1, |t| t.col);
        Error::Syntax { line: self.line, column: col, message: msg.to_string() }
    }

    fn error_at(&self, token: usize, msg: &str) -> Error {
        Error::Syntax { line: self.line, column: self.tokens[token].col, message: msg.to_string() }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok) -> Result<()> {
        if self.eat(tok) {
            Ok(())
        } else {
            let what = match tok {
                Tok::Colon => "`:`",
                Tok::Comma => "`,`",
                Tok::Eq => "`=`",
                _ => "token",
            };
            Err(self.error_here(&format!("expected {what}")))
        }
    }

    fn ident(&mut self) -> Result<String> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.error_here("expected a name")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<()> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.error_here(&format!("expected `{kw}`"))),
        }
    }

    fn number(&mut self) -> Result<f64> {
        let negative = self.eat(&Tok::Minus);
        match self.peek() {
            Some(Tok::Number(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(if negative { -v } else { v })
            }
            _ => Err(self.error_here("expected a number")),
        }
    }

    fn finish(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error_here("unexpected trailing input"))
        }
    }

    /// `term (('+' | '-') term)*` where `term = [number] ['*'] species | number`.
    fn complex(&mut self, species: &[String]) -> Result<Vec<f64>> {
        let index: HashMap<&str, usize> = species.iter().enumerate().map(|(i, s)| (s.as_str(), i)).collect();
        let mut out = vec![0.0; species.len()];
        let mut sign = if self.eat(&Tok::Minus) { -1.0 } else { 1.0 };
        loop {
            let coef = match self.peek() {
                Some(Tok::Number(v)) => {
                    let v = *v;
                    self.pos += 1;
                    self.eat(&Tok::Star);
                    Some(v)
                }
                _ => None,
            };
            match self.peek() {
                Some(Tok::Ident(name)) => {
                    let col = self.column();
                    let Some(&s) = index.get(name.as_str()) else {
                        let _ = col;
                        return Err(Error::UndeclaredSpecies { line: self.line, name: name.clone() });
                    };
                    self.pos += 1;
                    out[s] += sign * coef.unwrap_or(1.0);
                }
                _ => match coef {
                    Some(0.0) => {}
                    Some(_) => return Err(self.error_here("expected a species name after the coefficient")),
                    None => return Err(self.error_here("expected a complex")),
                },
            }
            if self.eat(&Tok::Plus) {
                sign = 1.0;
            } else if self.eat(&Tok::Minus) {
                sign = -1.0;
            } else {
                break;
            }
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const FOUR_CYCLE: &str = "\
species: X Y Z
vertex v1: stoich = 0        , kinetic = -3 Z
vertex v2: stoich = X        , kinetic = X
vertex v3: stoich = Y        , kinetic = 3 X + Y
vertex v4: stoich = Z        , kinetic = 4 Y + Z
edge v1 -> v2 : k = 1.0
edge v2 -> v3 : k = 1.0
edge v3 -> v4 : k = 1.0
edge v4 -> v1 : k = 1.0
";

    #[test]
    fn parses_four_cycle() {
        let f = parse_network_file(FOUR_CYCLE).unwrap();
        let net = &f.network;
        assert_eq!(net.n_species(), 3);
        assert_eq!(net.n_vertices(), 4);
        assert_eq!(net.n_edges(), 4);
        assert_eq!(net.vertices()[0].complex.stoich, vec![0.0, 0.0, 0.0]);
        assert_eq!(net.vertices()[0].complex.kinetic, Some(vec![0.0, 0.0, -3.0]));
        assert_eq!(net.vertices()[2].complex.kinetic, Some(vec![3.0, 1.0, 0.0]));
        assert_eq!(f.rates().unwrap().as_slice(), &[1.0; 4]);
    }

    #[test]
    fn reversible_shorthand_expands() {
        let f = parse_network_file(
            "species: X Y\nvertex x: stoich = X, kinetic = X\nvertex y: stoich = Y, kinetic = 0\nedge x <-> y : k = 2, 3\n",
        )
        .unwrap();
        assert_eq!(f.network.n_vertices(), 2);
        assert_eq!(f.network.edges(), &[Edge { source: 0, target: 1 }, Edge { source: 1, target: 0 }]);
        assert_eq!(f.rates, vec![Some(2.0), Some(3.0)]);
    }

    #[test]
    fn rates_may_be_omitted() {
        let f = parse_network_file("species: X\nvertex a: stoich = X, kinetic = X\nvertex b: stoich = 2X\nedge a -> b\n")
            .unwrap();
        assert_eq!(f.rates, vec![None]);
        assert!(f.rates().is_none());
        assert_eq!(f.network.vertices()[1].complex.stoich, vec![2.0]);
    }

    #[test]
    fn comments_and_signs() {
        let net = parse_network(
            "# header\nspecies: A B   # two\nvertex a: stoich = 0.5 A + B, kinetic = -A - 2*B\nvertex b: stoich = 0\nedge a -> b\n",
        )
        .unwrap();
        assert_eq!(net.vertices()[0].complex.stoich, vec![0.5, 1.0]);
        assert_eq!(net.vertices()[0].complex.kinetic, Some(vec![-1.0, -2.0]));
    }

    #[test]
    fn empty_vertex_list() {
        assert!(matches!(parse_network("species: X\n"), Err(Error::NoVertices)));
    }

    #[test]
    fn syntax_error_reports_location() {
        let err = parse_network("species: X\nvertex a stoich = X\n").unwrap_err();
        match err {
            Error::Syntax { line, column, .. } => {
                assert_eq!(line, 2);
                assert_eq!(column, 10);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn undeclared_species() {
        let err = parse_network("species: X\nvertex a: stoich = Q\n").unwrap_err();
        assert!(matches!(err, Error::UndeclaredSpecies { line: 2, ref name } if name == "Q"));
    }

    #[test]
    fn missing_kinetic_on_source() {
        let err = parse_network("species: X\nvertex a: stoich = X\nvertex b: stoich = 0\nedge a -> b\n").unwrap_err();
        assert!(matches!(err, Error::MissingKinetic(ref v) if v == "a"));
    }

    #[test]
    fn self_loop_and_duplicate() {
        let base = "species: X\nvertex a: stoich = X, kinetic = X\nvertex b: stoich = 0, kinetic = 0\n";
        assert!(matches!(parse_network(&format!("{base}edge a -> a\n")), Err(Error::SelfLoop(_))));
        assert!(matches!(
            parse_network(&format!("{base}edge a -> b\nedge a <-> b\n")),
            Err(Error::DuplicateEdge(..))
        ));
    }

    #[test]
    fn undeclared_vertex_in_edge() {
        let err = parse_network("species: X\nvertex a: stoich = X, kinetic = X\nedge a -> zz\n").unwrap_err();
        assert!(matches!(err, Error::Syntax { line: 3, .. }));
    }

    fn arb_network() -> impl Strategy<Value = (GmasNetwork, Option<RateAssignment>)> {
        (1usize..4, 1usize..5).prop_flat_map(|(n, m)| {
            let coef = prop_oneof![Just(0.0), Just(1.0), Just(2.0), -5.0..5.0f64];
            (
                proptest::collection::vec(proptest::collection::vec(0.0..4.0f64, n), m),
                proptest::collection::vec(proptest::collection::vec(coef, n), m),
                proptest::collection::vec(any::<bool>(), m * m),
                proptest::collection::vec(0.01..100.0f64, m * m),
                any::<bool>(),
            )
                .prop_map(move |(stoich, kinetic, mask, k, with_rates)| {
                    let species = (0..n).map(|i| format!("S{i}")).collect();
                    let vertices = stoich
                        .into_iter()
                        .zip(kinetic)
                        .enumerate()
                        .map(|(i, (s, kin))| Vertex { name: format!("v{i}"), complex: ComplexPair { stoich: s, kinetic: Some(kin) } })
                        .collect();
                    let mut edges = Vec::new();
                    let mut rates = Vec::new();
                    for a in 0..m {
                        for b in 0..m {
                            if a != b && mask[a * m + b] {
                                edges.push(Edge { source: a, target: b });
                                rates.push(k[a * m + b]);
                            }
                        }
                    }
                    let net = GmasNetwork::new(species, vertices, edges).unwrap();
                    let rates = with_rates.then(|| RateAssignment::new(rates).unwrap());
                    (net, rates)
                })
        })
    }

    proptest! {
        #[test]
        fn text_round_trip((net, rates) in arb_network()) {
            let text = to_text(&net, rates.as_ref());
            let back = parse_network_file(&text).unwrap();
            prop_assert_eq!(&back.network, &net);
            prop_assert_eq!(back.rates().filter(|r| !r.is_empty()), rates.filter(|r| !r.is_empty()));
        }
    }
}

//! Line-oriented text formats.
//!
//! Instance documents:
//!
//! ```text
//! tdg 1
//! lifetime 2
//! v a
//! v b
//! active a 1-2
//! active b 2
//! e ab a b
//! te ab 1 2
//! roots 1
//! r a 1
//! ```
//!
//! `active` takes timestamps and inclusive ranges `t1-t2`. `lifetime` is an
//! optional upper bound. Solution documents start with `sol 1`, an optional
//! `variant <spanning> <disjointness>` line, and then one `branching <i>`
//! block per branching holding `active` and `te` lines. WDP documents
//! start with `wdp 1` and hold `v`, `e` and exactly two `req <s> <t>` lines.
//! Everywhere `#` starts a comment.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use thiserror::Error;

use crate::model::{
    ModelError, ProblemVariant, RootSet, TemporalDigraph, TemporalEdge, TemporalVertex, Time,
};
use crate::reach::TemporalBranching;
use crate::reductions::{CnfFormula, WdpInstance};
use crate::static_branchings::StaticDigraph;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("{0}")]
    Document(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines with comments stripped, numbered from 1.
fn lines(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("");
        let toks: Vec<&str> = l.split_whitespace().collect();
        (!toks.is_empty()).then_some((i + 1, toks))
    })
}

fn number<T: std::str::FromStr>(line: usize, tok: &str, what: &str) -> Result<T, ParseError> {
    tok.parse()
        .map_err(|_| syntax(line, format!("expected {what}, found `{tok}`")))
}

fn arity(line: usize, toks: &[&str], n: usize) -> Result<(), ParseError> {
    if toks.len() != n {
        return Err(syntax(
            line,
            format!(
                "`{}` takes {} argument(s), found {}",
                toks[0],
                n - 1,
                toks.len() - 1
            ),
        ));
    }
    Ok(())
}

fn header(line: usize, toks: &[&str], magic: &str) -> Result<(), ParseError> {
    if toks != [magic, "1"] {
        return Err(syntax(line, format!("expected header `{magic} 1`")));
    }
    Ok(())
}

fn times(line: usize, toks: &[&str]) -> Result<Vec<Time>, ParseError> {
    let mut out = Vec::new();
    for tok in toks {
        match tok.split_once('-') {
            Some((a, b)) => {
                let a: Time = number(line, a, "a timestamp")?;
                let b: Time = number(line, b, "a timestamp")?;
                if a > b {
                    return Err(syntax(line, format!("empty range `{tok}`")));
                }
                out.extend(a..=b);
            }
            None => out.push(number(line, tok, "a timestamp")?),
        }
    }
    Ok(out)
}

fn vertex(g: &TemporalDigraph, line: usize, name: &str) -> Result<usize, ParseError> {
    g.vertex_id(name)
        .ok_or_else(|| syntax(line, format!("undeclared vertex `{name}`")))
}

fn edge(g: &TemporalDigraph, line: usize, name: &str) -> Result<usize, ParseError> {
    g.edge_id(name)
        .ok_or_else(|| syntax(line, format!("undeclared edge `{name}`")))
}

fn located(line: usize, e: ModelError) -> ParseError {
    syntax(line, e.to_string())
}

/// Parses an instance document. The digraph and root sets are validated.
pub fn parse_instance(text: &str) -> Result<(TemporalDigraph, Vec<RootSet>), ParseError> {
    let mut it = lines(text);
    match it.next() {
        Some((line, toks)) => header(line, &toks, "tdg")?,
        None => return Err(ParseError::Document("empty document".into())),
    }
    let mut g = TemporalDigraph::new();
    let mut roots: Vec<RootSet> = Vec::new();
    let mut bound: Option<(usize, Time)> = None;
    for (line, toks) in it {
        match toks[0] {
            "lifetime" => {
                arity(line, &toks, 2)?;
                bound = Some((line, number(line, toks[1], "a timestamp")?));
            }
            "v" => {
                arity(line, &toks, 2)?;
                g.add_vertex(toks[1]).map_err(|e| located(line, e))?;
            }
            "active" => {
                if toks.len() < 3 {
                    return Err(syntax(line, "`active` needs a vertex and timestamps"));
                }
                let v = vertex(&g, line, toks[1])?;
                g.activate_range(v, times(line, &toks[2..])?);
            }
            "e" => {
                arity(line, &toks, 4)?;
                let tail = vertex(&g, line, toks[2])?;
                let head = vertex(&g, line, toks[3])?;
                g.add_edge(toks[1], tail, head)
                    .map_err(|e| located(line, e))?;
            }
            "te" => {
                arity(line, &toks, 4)?;
                let e = edge(&g, line, toks[1])?;
                let d = number(line, toks[2], "a departure time")?;
                let a = number(line, toks[3], "an arrival time")?;
                g.add_temporal_edge(e, d, a);
            }
            "roots" => {
                arity(line, &toks, 2)?;
                let i: usize = number(line, toks[1], "a root set index")?;
                if i != roots.len() + 1 {
                    return Err(syntax(
                        line,
                        format!("expected root set {}, found {i}", roots.len() + 1),
                    ));
                }
                roots.push(RootSet::new());
            }
            "r" => {
                arity(line, &toks, 3)?;
                let v = vertex(&g, line, toks[1])?;
                let t = number(line, toks[2], "a timestamp")?;
                let set = roots
                    .last_mut()
                    .ok_or_else(|| syntax(line, "`r` outside a `roots` block"))?;
                set.insert(TemporalVertex::new(v, t));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    if let (Some((line, bound)), Some(life)) = (bound, g.lifetime()) {
        if life > bound {
            return Err(syntax(
                line,
                format!("lifetime {bound} is below the largest timestamp {life}"),
            ));
        }
    }
    g.ensure_valid()?;
    g.ensure_roots(&roots)?;
    Ok((g, roots))
}

fn write_times(out: &mut String, ts: &BTreeSet<Time>) {
    let (lo, hi) = (
        *ts.first().expect("nonempty"),
        *ts.last().expect("nonempty"),
    );
    if ts.len() > 1 && (hi - lo) as usize + 1 == ts.len() {
        let _ = write!(out, " {lo}-{hi}");
    } else {
        for t in ts {
            let _ = write!(out, " {t}");
        }
    }
}

fn write_activity(out: &mut String, g: &TemporalDigraph, gamma: impl Fn(usize) -> BTreeSet<Time>) {
    for v in 0..g.num_vertices() {
        let ts = gamma(v);
        if !ts.is_empty() {
            let _ = write!(out, "active {}", g.vertex_name(v));
            write_times(out, &ts);
            out.push('\n');
        }
    }
}

/// Canonical instance document.
pub fn serialize_instance(g: &TemporalDigraph, roots: &[RootSet]) -> String {
    let mut out = String::from("tdg 1\n");
    if let Some(t) = g.lifetime() {
        let _ = writeln!(out, "lifetime {t}");
    }
    for v in 0..g.num_vertices() {
        let _ = writeln!(out, "v {}", g.vertex_name(v));
    }
    write_activity(&mut out, g, |v| g.gamma(v).clone());
    for e in g.edges() {
        let _ = writeln!(
            out,
            "e {} {} {}",
            e.name,
            g.vertex_name(e.tail),
            g.vertex_name(e.head)
        );
    }
    for (i, e) in g.edges().iter().enumerate() {
        for (d, a) in g.lambda(i) {
            let _ = writeln!(out, "te {} {d} {a}", e.name);
        }
    }
    for (i, set) in roots.iter().enumerate() {
        let _ = writeln!(out, "roots {}", i + 1);
        for r in set {
            let _ = writeln!(out, "r {} {}", g.vertex_name(r.vertex), r.time);
        }
    }
    out
}

/// Parses a solution document against its instance. Branching `i` gets
/// root set `R_i`.
pub fn parse_solution(
    text: &str,
    host: &TemporalDigraph,
    roots: &[RootSet],
) -> Result<(Option<ProblemVariant>, Vec<TemporalBranching>), ParseError> {
    let mut it = lines(text);
    match it.next() {
        Some((line, toks)) => header(line, &toks, "sol")?,
        None => return Err(ParseError::Document("empty document".into())),
    }
    let mut variant = None;
    let mut bs: Vec<TemporalBranching> = Vec::new();
    for (line, toks) in it {
        match toks[0] {
            "variant" => {
                arity(line, &toks, 3)?;
                let spanning = toks[1].parse().map_err(|e: String| syntax(line, e))?;
                let disjointness = toks[2].parse().map_err(|e: String| syntax(line, e))?;
                variant = Some(ProblemVariant::new(spanning, disjointness));
            }
            "branching" => {
                arity(line, &toks, 2)?;
                let i: usize = number(line, toks[1], "a branching index")?;
                if i != bs.len() + 1 {
                    return Err(syntax(
                        line,
                        format!("expected branching {}, found {i}", bs.len() + 1),
                    ));
                }
                let r = roots.get(bs.len()).ok_or_else(|| {
                    syntax(
                        line,
                        format!("the instance has only {} root sets", roots.len()),
                    )
                })?;
                bs.push(TemporalBranching::empty(host, r.clone()));
            }
            "active" | "te" => {
                let b = bs
                    .last_mut()
                    .ok_or_else(|| syntax(line, format!("`{}` outside a branching", toks[0])))?;
                if toks[0] == "active" {
                    if toks.len() < 3 {
                        return Err(syntax(line, "`active` needs a vertex and timestamps"));
                    }
                    let v = vertex(host, line, toks[1])?;
                    b.gamma[v].extend(times(line, &toks[2..])?);
                } else {
                    arity(line, &toks, 4)?;
                    let e = edge(host, line, toks[1])?;
                    b.insert(TemporalEdge {
                        edge: e,
                        departure: number(line, toks[2], "a departure time")?,
                        arrival: number(line, toks[3], "an arrival time")?,
                    });
                }
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    Ok((variant, bs))
}

/// Canonical solution document.
pub fn serialize_solution(
    host: &TemporalDigraph,
    variant: Option<ProblemVariant>,
    bs: &[TemporalBranching],
) -> String {
    let mut out = String::from("sol 1\n");
    if let Some(v) = variant {
        let _ = writeln!(out, "variant {} {}", v.spanning, v.disjointness);
    }
    for (i, b) in bs.iter().enumerate() {
        let _ = writeln!(out, "branching {}", i + 1);
        write_activity(&mut out, host, |v| b.gamma[v].clone());
        for te in b.temporal_edges() {
            let _ = writeln!(
                out,
                "te {} {} {}",
                host.edge(te.edge).name,
                te.departure,
                te.arrival
            );
        }
    }
    out
}

/// DIMACS CNF restricted to clauses of exactly 3 positive literals.
pub fn parse_cnf(text: &str) -> Result<CnfFormula, ParseError> {
    let mut declared: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    let mut last_line = 0;
    for (line, l) in text.lines().enumerate() {
        let line = line + 1;
        let toks: Vec<&str> = l.split_whitespace().collect();
        if toks.is_empty() || toks[0] == "c" || toks[0] == "%" {
            continue;
        }
        last_line = line;
        if toks[0] == "p" {
            if declared.is_some() {
                return Err(syntax(line, "second problem line"));
            }
            if toks.len() != 4 || toks[1] != "cnf" {
                return Err(syntax(line, "expected `p cnf <variables> <clauses>`"));
            }
            declared = Some((
                number(line, toks[2], "a variable count")?,
                number(line, toks[3], "a clause count")?,
            ));
            continue;
        }
        let Some((n, _)) = declared else {
            return Err(syntax(line, "clause before the problem line"));
        };
        for tok in toks {
            let lit: i64 = number(line, tok, "a literal")?;
            if lit < 0 {
                return Err(syntax(
                    line,
                    format!("negative literal {lit}: only positive literals are allowed"),
                ));
            }
            if lit == 0 {
                let clause: [usize; 3] = current.as_slice().try_into().map_err(|_| {
                    syntax(
                        line,
                        format!("clause has {} literals, expected exactly 3", current.len()),
                    )
                })?;
                clauses.push(clause);
                current.clear();
            } else if lit as usize > n {
                return Err(syntax(
                    line,
                    format!("variable {lit} exceeds the declared {n}"),
                ));
            } else {
                current.push(lit as usize);
            }
        }
    }
    let Some((n, m)) = declared else {
        return Err(ParseError::Document("missing `p cnf` line".into()));
    };
    if !current.is_empty() {
        return Err(syntax(last_line, "last clause is not terminated by 0"));
    }
    if clauses.len() != m {
        return Err(ParseError::Document(format!(
            "declared {m} clauses, found {}",
            clauses.len()
        )));
    }
    CnfFormula::new(n, clauses).map_err(|e| ParseError::Document(e.to_string()))
}

pub fn serialize_cnf(phi: &CnfFormula) -> String {
    let mut out = format!("p cnf {} {}\n", phi.num_vars(), phi.clauses().len());
    for [a, b, c] in phi.clauses() {
        let _ = writeln!(out, "{a} {b} {c} 0");
    }
    out
}

pub fn parse_wdp(text: &str) -> Result<WdpInstance, ParseError> {
    let mut it = lines(text);
    match it.next() {
        Some((line, toks)) => header(line, &toks, "wdp")?,
        None => return Err(ParseError::Document("empty document".into())),
    }
    let mut d = StaticDigraph::new();
    let mut requests = Vec::new();
    let find = |d: &StaticDigraph, line, name: &str| {
        d.vertex_id(name)
            .ok_or_else(|| syntax(line, format!("undeclared vertex `{name}`")))
    };
    for (line, toks) in it {
        match toks[0] {
            "v" => {
                arity(line, &toks, 2)?;
                d.add_vertex(toks[1])
                    .map_err(|e| syntax(line, e.to_string()))?;
            }
            "e" => {
                arity(line, &toks, 4)?;
                let tail = find(&d, line, toks[2])?;
                let head = find(&d, line, toks[3])?;
                d.add_edge(toks[1], tail, head)
                    .map_err(|e| syntax(line, e.to_string()))?;
            }
            "req" => {
                arity(line, &toks, 3)?;
                requests.push((find(&d, line, toks[1])?, find(&d, line, toks[2])?));
            }
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }
    WdpInstance::new(d, requests).map_err(|e| ParseError::Document(e.to_string()))
}

pub fn serialize_wdp(w: &WdpInstance) -> String {
    let d = &w.digraph;
    let mut out = String::from("wdp 1\n");
    for v in 0..d.num_vertices() {
        let _ = writeln!(out, "v {}", d.vertex_name(v));
    }
    for e in d.edges() {
        let _ = writeln!(
            out,
            "e {} {} {}",
            e.id,
            d.vertex_name(e.tail),
            d.vertex_name(e.head)
        );
    }
    for &(s, t) in &w.requests {
        let _ = writeln!(out, "req {} {}", d.vertex_name(s), d.vertex_name(t));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reductions::reduce_nae3sat_vertex;

    #[test]
    fn minimal_document_round_trips() {
        let text = "tdg 1\nlifetime 1\nv a\nactive a 1\nroots 1\n";
        let (g, roots) = parse_instance(text).unwrap();
        assert_eq!(roots, vec![RootSet::new()]);
        assert_eq!(serialize_instance(&g, &roots), text);
    }

    #[test]
    fn comments_ranges_and_lists() {
        let text = "# header\ntdg 1\nv a # vertex\nv b\nactive a 1-3 5\nactive b 2\n\
                    e ab a b\nte ab 1 2\nroots 1\nr a 1\n";
        let (g, roots) = parse_instance(text).unwrap();
        assert_eq!(g.gamma(0), &BTreeSet::from([1, 2, 3, 5]));
        assert_eq!(roots[0].len(), 1);
        let canon = serialize_instance(&g, &roots);
        assert!(canon.contains("active a 1 2 3 5\n"));
        let (g2, r2) = parse_instance(&canon).unwrap();
        assert_eq!(serialize_instance(&g2, &r2), canon);
    }

    #[test]
    fn undeclared_edge_names_line() {
        let err = parse_instance("tdg 1\nv a\nactive a 1\nte x 1 1\n").unwrap_err();
        assert_eq!(
            err,
            ParseError::Syntax {
                line: 4,
                message: "undeclared edge `x`".into()
            }
        );
    }

    #[test]
    fn unknown_directive_is_fatal() {
        let err = parse_instance("tdg 1\nvertex a\n").unwrap_err();
        assert!(matches!(err, ParseError::Syntax { line: 2, .. }));
        assert!(parse_instance("tdg 2\n").is_err());
        assert!(parse_instance("").is_err());
    }

    #[test]
    fn lifetime_hint_is_an_upper_bound() {
        assert!(parse_instance("tdg 1\nlifetime 1\nv a\nactive a 2\n").is_err());
        assert!(parse_instance("tdg 1\nlifetime 3\nv a\nactive a 2\n").is_ok());
    }

    #[test]
    fn invalid_temporal_edge_is_rejected() {
        let err = parse_instance("tdg 1\nv a\nv b\nactive a 1\nactive b 1\ne ab a b\nte ab 2 1\n");
        assert!(matches!(
            err,
            Err(ParseError::Model(ModelError::Invalid(_)))
        ));
    }

    #[test]
    fn vertex_gadget_round_trips() {
        let phi = parse_cnf("p cnf 4 2\n1 2 3 0\n2 3 4 0\n").unwrap();
        let out = reduce_nae3sat_vertex(&phi);
        let text = serialize_instance(&out.instance, &out.roots);
        let (g, roots) = parse_instance(&text).unwrap();
        assert_eq!(g, out.instance);
        assert_eq!(roots, out.roots);
        assert_eq!(serialize_instance(&g, &roots), text);
    }

    #[test]
    fn cnf_parsing() {
        let phi = parse_cnf("c example\np cnf 3 1\n1 2 3 0\n").unwrap();
        assert_eq!(phi.clauses(), &[[1, 2, 3]]);
        let err = parse_cnf("p cnf 3 1\n1 -2 3 0\n").unwrap_err();
        assert!(err.to_string().contains("line 2"));
        assert!(parse_cnf("p cnf 3 1\n1 2 0\n").is_err());
        assert!(parse_cnf("p cnf 3 2\n1 2 3 0\n").is_err());
        assert!(parse_cnf("p cnf 2 1\n1 2 3 0\n").is_err());
        // clauses may span lines
        let phi = parse_cnf("p cnf 4 2\n1 2\n3 0 2 3 4\n0\n").unwrap();
        assert_eq!(serialize_cnf(&phi), "p cnf 4 2\n1 2 3 0\n2 3 4 0\n");
    }

    #[test]
    fn solution_round_trips() {
        let (g, roots) = parse_instance(
            "tdg 1\nv a\nv b\nactive a 1-2\nactive b 2\ne ab a b\nte ab 1 2\nroots 1\nr a 1\n",
        )
        .unwrap();
        let text =
            "sol 1\nvariant temporal t-edge\nbranching 1\nactive a 1-2\nactive b 2\nte ab 1 2\n";
        let (variant, bs) = parse_solution(text, &g, &roots).unwrap();
        assert_eq!(
            variant.unwrap().to_string(),
            "t-edge-disjoint temporal-spanning"
        );
        assert_eq!(serialize_solution(&g, variant, &bs), text);
        assert!(parse_solution("sol 1\nbranching 2\n", &g, &roots).is_err());
        assert!(parse_solution("sol 1\nte ab 1 2\n", &g, &roots).is_err());
    }

    #[test]
    fn wdp_round_trips() {
        let text = "wdp 1\nv s1\nv t1\nv s2\nv t2\ne a s1 t1\ne b s2 t2\nreq s1 t1\nreq s2 t2\n";
        let w = parse_wdp(text).unwrap();
        assert_eq!(serialize_wdp(&w), text);
        assert!(parse_wdp("wdp 1\nv a\nreq a a\n").is_err());
    }
}

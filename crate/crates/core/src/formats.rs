//! Line-oriented text formats. Blank lines and lines starting with `#` are
//! ignored everywhere. Errors carry 1-based line and column numbers.
//!
//! ```text
//! tt 2 6
//!
//! g0 = INPUT 1
//! g1 = INPUT 2
//! g2 = XOR(g0, g1)
//! g3 = ORACLE[tt 2 7](g2, g0)
//! OUTPUT g3
//!
//! model 2 closed neg-exact name=demo
//! member 0 tt 2 0
//! op AND 2 0 1 -> 0
//!
//! cert sym g=3
//! tuple AND 2 1 2
//! ```
//!
//! Circuit inputs are numbered from 1 (`INPUT 1` is x_1).

use crate::circuit::{Circuit, Gate};
use crate::connective::Connective;
use crate::distance::{CertMode, CertTuple, CoverCertificate, DepthCoverCertificate, Side};
use crate::error::{Error, Result};
use crate::fusion::{PairCover, SemiFilter, SemiFilterSet, Subset, TupleCover, Universe};
use crate::model::{gen_exact_model, gen_fusion_model, gen_rs_poly_model, ApproxModel, MemberId};
use crate::truth_table::TruthTable;
use std::collections::BTreeMap;
use std::fmt::Write;

#[derive(Clone, Copy, Debug)]
struct Tok<'a> {
    col: usize,
    s: &'a str,
}

fn tokens(line: &str) -> Vec<Tok<'_>> {
    let mut v = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        match (c.is_whitespace(), start) {
            (true, Some(s)) => {
                v.push(Tok { col: s + 1, s: &line[s..i] });
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    if let Some(s) = start {
        v.push(Tok { col: s + 1, s: &line[s..] });
    }
    v
}

/// Content lines with their 1-based numbers.
fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('#')
    })
}

fn num<T: std::str::FromStr>(line: usize, t: Tok, what: &str) -> Result<T> {
    t.s.parse().map_err(|_| Error::parse(line, t.col, format!("expected {what}, found {:?}", t.s)))
}

fn need<'a>(line: usize, toks: &[Tok<'a>], i: usize, what: &str, end_col: usize) -> Result<Tok<'a>> {
    toks.get(i).copied().ok_or_else(|| Error::parse(line, end_col, format!("missing {what}")))
}

fn end_col(text: &str) -> usize {
    text.trim_end().len() + 1
}

fn shift(e: Error, line: usize, col: usize) -> Error {
    match e {
        Error::Parse { col: c, msg, .. } => Error::parse(line, col + c - 1, msg),
        e => e,
    }
}

fn tt_from(line: usize, toks: &[Tok], at: usize, ec: usize) -> Result<TruthTable> {
    let kw = need(line, toks, at, "`tt`", ec)?;
    if kw.s != "tt" {
        return Err(Error::parse(line, kw.col, format!("expected `tt`, found {:?}", kw.s)));
    }
    let nt = need(line, toks, at + 1, "variable count", ec)?;
    let n: usize = num(line, nt, "a variable count")?;
    let ht = need(line, toks, at + 2, "hex table", ec)?;
    TruthTable::from_hex(n, ht.s).map_err(|e| match e {
        Error::Precondition(m) => Error::parse(line, nt.col, m),
        e => shift(e, line, ht.col),
    })
}

// ---------------------------------------------------------------- tt

pub fn parse_tt(text: &str) -> Result<TruthTable> {
    let mut it = lines(text);
    let (ln, l) = it.next().ok_or_else(|| Error::parse(1, 1, "empty input"))?;
    let toks = tokens(l);
    let t = tt_from(ln, &toks, 0, end_col(l))?;
    if let Some(extra) = toks.get(3) {
        return Err(Error::parse(ln, extra.col, "trailing input"));
    }
    if let Some((ln, _)) = it.next() {
        return Err(Error::parse(ln, 1, "trailing input"));
    }
    Ok(t)
}

pub fn emit_tt(t: &TruthTable) -> String {
    format!("{t}\n")
}

/// A truth table given inline (`tt 2 6`, `2:6`) or as a file path.
pub fn load_tt(spec: &str) -> Result<TruthTable> {
    let s = spec.trim();
    if s.starts_with("tt ") {
        return parse_tt(s);
    }
    if let Some((n, h)) = s.split_once(':') {
        if let Ok(n) = n.parse::<usize>() {
            return TruthTable::from_hex(n, h);
        }
    }
    parse_tt(&read(spec)?)
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {path}: {e}")))
}

// ---------------------------------------------------------------- circuits

fn gate_ref(line: usize, col: usize, s: &str, limit: usize) -> Result<usize> {
    let idx = s
        .strip_prefix('g')
        .and_then(|r| r.parse::<usize>().ok())
        .ok_or_else(|| Error::parse(line, col, format!("expected a gate name like g0, found {s:?}")))?;
    if idx >= limit {
        return Err(Error::parse(line, col, format!("{s} is not defined before this line")));
    }
    Ok(idx)
}

fn parse_gate(ln: usize, l: &str, i: usize, n: &mut usize, max_input: &mut usize) -> Result<Gate> {
    let eq = l.find('=').ok_or_else(|| Error::parse(ln, 1, "expected `g<i> = ...`"))?;
    let lhs = l[..eq].trim();
    let lcol = l.find(lhs).unwrap_or(0) + 1;
    let want = format!("g{i}");
    if lhs != want {
        return Err(Error::parse(ln, lcol, format!("expected {want}, found {lhs:?}")));
    }
    let rhs_start = eq + 1 + (l[eq + 1..].len() - l[eq + 1..].trim_start().len());
    let rhs = l[rhs_start..].trim_end();
    let col = rhs_start + 1;
    let toks = tokens(rhs);
    if let Some(t) = toks.first() {
        match t.s {
            "INPUT" => {
                let k = need(ln, &toks, 1, "input index", col + rhs.len())?;
                let k1: usize = num(ln, Tok { col: col + k.col - 1, s: k.s }, "an input index")?;
                if k1 == 0 {
                    return Err(Error::parse(ln, col + k.col - 1, "inputs are numbered from 1"));
                }
                *max_input = (*max_input).max(k1);
                *n = (*n).max(k1);
                return Ok(Gate::Input(k1 - 1));
            }
            "CONST" => {
                let b = need(ln, &toks, 1, "constant", col + rhs.len())?;
                return match b.s {
                    "0" => Ok(Gate::Const(false)),
                    "1" => Ok(Gate::Const(true)),
                    s => Err(Error::parse(ln, col + b.col - 1, format!("expected 0 or 1, found {s:?}"))),
                };
            }
            _ => {}
        }
    }
    let open = rhs.rfind('(').ok_or_else(|| Error::parse(ln, col, "expected INPUT, CONST or CONN(args)"))?;
    if !rhs.ends_with(')') {
        return Err(Error::parse(ln, col + rhs.len(), "missing `)`"));
    }
    let head = rhs[..open].trim();
    let args_s = &rhs[open + 1..rhs.len() - 1];
    let mut args = Vec::new();
    let mut off = open + 1;
    if !args_s.trim().is_empty() {
        for a in args_s.split(',') {
            let lead = a.len() - a.trim_start().len();
            args.push(gate_ref(ln, col + off + lead, a.trim(), i)?);
            off += a.len() + 1;
        }
    }
    let conn = if let Some(inner) = head.strip_prefix("ORACLE[") {
        let inner = inner
            .strip_suffix(']')
            .ok_or_else(|| Error::parse(ln, col + head.len(), "missing `]` after the oracle table"))?;
        let toks = tokens(inner);
        let t = tt_from(ln, &toks, 0, inner.len() + 1).map_err(|e| shift(e, ln, col + 7))?;
        Connective::Oracle(t)
    } else {
        Connective::from_name(head, args.len())
            .ok_or_else(|| Error::parse(ln, col, format!("unknown connective {head} with {} inputs", args.len())))?
    };
    if conn.arity() != args.len() {
        return Err(Error::parse(ln, col + open, format!("{} expects {} inputs, got {}", head, conn.arity(), args.len())));
    }
    Ok(Gate::Apply(conn, args))
}

/// Parse a circuit. The number of variables is the largest input index
/// unless a `vars <n>` line comes first.
pub fn parse_circuit(text: &str) -> Result<Circuit> {
    let mut gates = Vec::new();
    let mut n = 0;
    let mut declared = None;
    let mut max_input = 0;
    let mut output = None;
    let mut last_line = 1;
    for (ln, l) in lines(text) {
        last_line = ln;
        if output.is_some() {
            return Err(Error::parse(ln, 1, "input after OUTPUT"));
        }
        let toks = tokens(l);
        match toks[0].s {
            "vars" if gates.is_empty() && declared.is_none() => {
                let t = need(ln, &toks, 1, "variable count", end_col(l))?;
                declared = Some(num::<usize>(ln, t, "a variable count")?);
            }
            "OUTPUT" => {
                let t = need(ln, &toks, 1, "output gate", end_col(l))?;
                output = Some(gate_ref(ln, t.col, t.s, gates.len())?);
            }
            _ => {
                let g = parse_gate(ln, l, gates.len(), &mut n, &mut max_input)?;
                gates.push(g);
            }
        }
    }
    let output = output.ok_or_else(|| Error::parse(last_line, 1, "missing OUTPUT line"))?;
    let n = match declared {
        Some(d) if d < max_input => return Err(Error::parse(1, 1, format!("vars {d} but x{max_input} is read"))),
        Some(d) => d,
        None => n,
    };
    Circuit::new(n, gates, output)
}

pub fn emit_circuit(c: &Circuit) -> String {
    let mut s = format!("vars {}\n", c.n());
    for (i, g) in c.gates().iter().enumerate() {
        match g {
            Gate::Input(k) => writeln!(s, "g{i} = INPUT {}", k + 1),
            Gate::Const(b) => writeln!(s, "g{i} = CONST {}", *b as u8),
            Gate::Apply(conn, ch) => {
                let args: Vec<String> = ch.iter().map(|j| format!("g{j}")).collect();
                let head = match conn {
                    Connective::Oracle(t) => format!("ORACLE[{t}]"),
                    c => c.name().to_string(),
                };
                writeln!(s, "g{i} = {head}({})", args.join(", "))
            }
        }
        .unwrap();
    }
    writeln!(s, "OUTPUT g{}", c.output()).unwrap();
    s
}

// ---------------------------------------------------------------- models

pub fn emit_model(m: &ApproxModel) -> String {
    let mut s = format!("model {}", m.n());
    if m.is_closed() {
        s.push_str(" closed");
    }
    if m.neg_is_exact {
        s.push_str(" neg-exact");
    }
    writeln!(s, " name={}", m.name().replace(char::is_whitespace, "_")).unwrap();
    for (id, t) in m.members().iter().enumerate() {
        writeln!(s, "member {id} {t}").unwrap();
    }
    for (k, out) in m.op_entries() {
        let ids: Vec<String> = k.inputs.iter().map(|i| i.to_string()).collect();
        writeln!(s, "op {} {} {} -> {out}", k.conn.name(), k.conn.arity(), ids.join(" ")).unwrap();
    }
    s
}

fn parse_conn(ln: usize, name: Tok, arity: Tok) -> Result<Connective> {
    let a: usize = num(ln, arity, "an arity")?;
    Connective::from_name(name.s, a).ok_or_else(|| Error::parse(ln, name.col, format!("unknown connective {} {a}", name.s)))
}

fn parse_ids(ln: usize, toks: &[Tok], count: usize) -> Result<Vec<MemberId>> {
    toks.iter().map(|&t| {
        let id: usize = num(ln, t, "a member id")?;
        if id >= count {
            return Err(Error::parse(ln, t.col, format!("member {id} is not defined")));
        }
        Ok(id)
    })
    .collect()
}

pub fn parse_model(text: &str) -> Result<ApproxModel> {
    let mut it = lines(text).peekable();
    let (ln, l) = it.next().ok_or_else(|| Error::parse(1, 1, "empty model file"))?;
    let toks = tokens(l);
    if toks[0].s != "model" {
        return Err(Error::parse(ln, toks[0].col, "expected `model <n>`"));
    }
    let n: usize = num(ln, need(ln, &toks, 1, "order", end_col(l))?, "a variable count")?;
    let (mut closed, mut neg, mut name) = (false, false, String::from("file"));
    for t in &toks[2..] {
        match t.s {
            "closed" => closed = true,
            "neg-exact" => neg = true,
            s if s.starts_with("name=") => name = s[5..].to_string(),
            s => return Err(Error::parse(ln, t.col, format!("unknown flag {s:?}"))),
        }
    }
    let mut members = Vec::new();
    let mut ops = Vec::new();
    for (ln, l) in it {
        let toks = tokens(l);
        let ec = end_col(l);
        match toks[0].s {
            "member" => {
                if !ops.is_empty() {
                    return Err(Error::parse(ln, 1, "member lines must precede op lines"));
                }
                let idt = need(ln, &toks, 1, "member id", ec)?;
                let id: usize = num(ln, idt, "a member id")?;
                if id != members.len() {
                    return Err(Error::parse(ln, idt.col, format!("expected member {}, found {id}", members.len())));
                }
                let t = tt_from(ln, &toks, 2, ec)?;
                if t.n() != n {
                    return Err(Error::parse(ln, toks[3].col, format!("member has {} variables, model order {n}", t.n())));
                }
                members.push(t);
            }
            "op" => {
                let arrow = toks
                    .iter()
                    .position(|t| t.s == "->")
                    .ok_or_else(|| Error::parse(ln, ec, "missing `-> <id>`"))?;
                let conn = parse_conn(ln, need(ln, &toks, 1, "connective", ec)?, need(ln, &toks, 2, "arity", ec)?)?;
                let ins = parse_ids(ln, &toks[3..arrow], members.len())?;
                if ins.len() != conn.arity() {
                    return Err(Error::parse(ln, toks[2].col, format!("arity {} but {} inputs", conn.arity(), ins.len())));
                }
                let out = parse_ids(ln, &[need(ln, &toks, arrow + 1, "output id", ec)?], members.len())?[0];
                ops.push((conn, ins, out));
            }
            s => return Err(Error::parse(ln, toks[0].col, format!("expected `member` or `op`, found {s:?}"))),
        }
    }
    let mut m = ApproxModel::from_members(n, &name, members, closed);
    m.neg_is_exact = neg;
    for (c, ins, out) in ops {
        m.set_op(c, ins, out);
    }
    Ok(m)
}

/// `gen:exact:<n>`, `gen:rs:<n>:<t>:<seed>`, `gen:fusion:<f>:<F0-file>` or
/// a model file.
pub fn load_model(spec: &str) -> Result<ApproxModel> {
    let Some(rest) = spec.strip_prefix("gen:") else {
        return parse_model(&read(spec)?);
    };
    let parts: Vec<&str> = rest.split(':').collect();
    let bad = || Error::parse(1, 1, format!("bad generator {spec:?}"));
    let int = |s: &str| s.parse::<u64>().map_err(|_| bad());
    match parts.as_slice() {
        ["exact", n] => {
            let n = int(n)? as usize;
            if n > 4 {
                return Err(Error::Precondition("exact models are listed in full; n <= 4".into()));
            }
            Ok(gen_exact_model(n))
        }
        ["rs", n, t, seed] => {
            let (n, t) = (int(n)? as usize, int(t)? as usize);
            if t == 0 || n > 10 {
                return Err(Error::Precondition("rs models need t >= 1 and n <= 10".into()));
            }
            Ok(gen_rs_poly_model(n, t, int(seed)?))
        }
        ["fusion", f, f0] => {
            let f = load_tt(f)?;
            let set = parse_sf(&read(f0)?)?;
            if set.universe.f != f {
                return Err(Error::Precondition("the semi-filter file is for another function".into()));
            }
            Ok(gen_fusion_model(&f, &set)?.model)
        }
        _ => Err(bad()),
    }
}

// ---------------------------------------------------------------- certificates

fn emit_tuples(s: &mut String, cert: &CoverCertificate) {
    writeln!(s, "cert {} g={}", cert.mode, cert.g).unwrap();
    for t in &cert.tuples {
        let ids: Vec<String> = t.key.inputs.iter().map(|i| i.to_string()).collect();
        let side = t.side.map(|s| format!("{s} ")).unwrap_or_default();
        writeln!(s, "tuple {side}{} {} {}", t.key.conn.name(), t.key.conn.arity(), ids.join(" ")).unwrap();
    }
}

pub fn emit_cert(cert: &CoverCertificate) -> String {
    let mut s = String::new();
    emit_tuples(&mut s, cert);
    s
}

/// Witness circuits follow `witness g` or `witness <id>` lines and end at
/// their OUTPUT line.
pub fn emit_depth_cert(dc: &DepthCoverCertificate) -> String {
    let mut s = String::new();
    emit_tuples(&mut s, &dc.cert);
    writeln!(s, "depth {}", dc.d).unwrap();
    writeln!(s, "witness g").unwrap();
    s.push_str(&emit_circuit(&dc.g_witness));
    for (id, c) in &dc.input_witnesses {
        writeln!(s, "witness {id}").unwrap();
        s.push_str(&emit_circuit(c));
    }
    s
}

fn parse_cert_lines(ls: &[(usize, &str)]) -> Result<(CoverCertificate, usize)> {
    let (ln, l) = *ls.first().ok_or_else(|| Error::parse(1, 1, "empty certificate"))?;
    let toks = tokens(l);
    if toks[0].s != "cert" {
        return Err(Error::parse(ln, toks[0].col, "expected `cert <mode> g=<id>`"));
    }
    let mt = need(ln, &toks, 1, "mode", end_col(l))?;
    let mode = match mt.s {
        "sym" => CertMode::Symmetric,
        "asym" => CertMode::Asymmetric,
        s => return Err(Error::parse(ln, mt.col, format!("unknown mode {s:?}"))),
    };
    let gt = need(ln, &toks, 2, "g=<id>", end_col(l))?;
    let g = gt
        .s
        .strip_prefix("g=")
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(ln, gt.col, "expected g=<id>"))?;
    let mut tuples = Vec::new();
    let mut used = 1;
    for &(ln, l) in &ls[1..] {
        let toks = tokens(l);
        if toks[0].s != "tuple" {
            break;
        }
        used += 1;
        let ec = end_col(l);
        let mut at = 1;
        let first = need(ln, &toks, 1, "connective", ec)?;
        let side = match first.s {
            "+" => Some(Side::Plus),
            "-" => Some(Side::Minus),
            _ => None,
        };
        if side.is_some() {
            at = 2;
        }
        let conn = parse_conn(ln, need(ln, &toks, at, "connective", ec)?, need(ln, &toks, at + 1, "arity", ec)?)?;
        let ids = toks[at + 2..]
            .iter()
            .map(|&t| num::<usize>(ln, t, "a member id"))
            .collect::<Result<Vec<_>>>()?;
        if ids.len() != conn.arity() {
            return Err(Error::parse(ln, toks[at + 1].col, format!("arity {} but {} inputs", conn.arity(), ids.len())));
        }
        tuples.push(CertTuple { side, key: crate::model::OpKey::new(conn, ids) });
    }
    Ok((CoverCertificate { mode, g, tuples }, used))
}

pub fn parse_cert(text: &str) -> Result<CoverCertificate> {
    let ls: Vec<(usize, &str)> = lines(text).collect();
    let (c, used) = parse_cert_lines(&ls)?;
    if let Some(&(ln, _)) = ls.get(used) {
        return Err(Error::parse(ln, 1, "unexpected line in a certificate"));
    }
    Ok(c)
}

pub fn parse_depth_cert(text: &str) -> Result<DepthCoverCertificate> {
    let ls: Vec<(usize, &str)> = lines(text).collect();
    let (cert, mut i) = parse_cert_lines(&ls)?;
    let (ln, l) = *ls.get(i).ok_or_else(|| Error::parse(ls.last().map_or(1, |x| x.0), 1, "missing `depth <d>`"))?;
    let toks = tokens(l);
    if toks[0].s != "depth" {
        return Err(Error::parse(ln, toks[0].col, "expected `depth <d>`"));
    }
    let d = num(ln, need(ln, &toks, 1, "depth", end_col(l))?, "a depth")?;
    i += 1;
    let mut g_witness = None;
    let mut input_witnesses = BTreeMap::new();
    while i < ls.len() {
        let (ln, l) = ls[i];
        let toks = tokens(l);
        if toks[0].s != "witness" {
            return Err(Error::parse(ln, toks[0].col, "expected `witness g` or `witness <id>`"));
        }
        let who = need(ln, &toks, 1, "witness target", end_col(l))?;
        let end = ls[i + 1..]
            .iter()
            .position(|(_, l)| l.trim_start().starts_with("OUTPUT"))
            .ok_or_else(|| Error::parse(ln, 1, "witness circuit without OUTPUT"))?
            + i
            + 1;
        let body: String = ls[i + 1..=end].iter().map(|(_, l)| format!("{l}\n")).collect();
        let c = parse_circuit(&body).map_err(|e| match e {
            Error::Parse { line, col, msg } => Error::parse(ls[i + line].0, col, msg),
            e => e,
        })?;
        if who.s == "g" {
            g_witness = Some(c);
        } else {
            input_witnesses.insert(num::<usize>(ln, who, "a member id")?, c);
        }
        i = end + 1;
    }
    let g_witness = g_witness.ok_or_else(|| Error::parse(1, 1, "missing `witness g`"))?;
    Ok(DepthCoverCertificate { cert, d, g_witness, input_witnesses })
}

// ---------------------------------------------------------------- semi-filters

fn subset_hex(a: u64, bits: usize) -> String {
    let digits = bits.div_ceil(4).max(1);
    format!("{a:0digits$x}")
}

fn parse_hex_mask(ln: usize, t: Tok, bits: usize) -> Result<u64> {
    let v = u64::from_str_radix(t.s, 16).map_err(|_| Error::parse(ln, t.col, format!("bad hex {:?}", t.s)))?;
    if bits < 64 && v >> bits != 0 {
        return Err(Error::parse(ln, t.col, format!("{} has bits beyond {bits}", t.s)));
    }
    Ok(v)
}

/// f, the universe U as point indices, then one `sf` line per family.
pub fn emit_sf(set: &SemiFilterSet) -> String {
    let mut s = emit_tt(&set.universe.f);
    let pts: Vec<String> = set.universe.u.iter().map(|x| x.to_string()).collect();
    writeln!(s, "universe {}", pts.join(" ")).unwrap();
    let k = set.universe.size();
    for f in &set.filters {
        writeln!(s, "sf {k} {}", subset_hex(f.family, 1 << k)).unwrap();
    }
    s
}

fn parse_universe(ls: &[(usize, &str)]) -> Result<(Universe, usize)> {
    let (ln, l) = *ls.first().ok_or_else(|| Error::parse(1, 1, "empty input"))?;
    let f = tt_from(ln, &tokens(l), 0, end_col(l))?;
    let (ln, l) = *ls.get(1).ok_or_else(|| Error::parse(ln + 1, 1, "missing `universe` line"))?;
    let toks = tokens(l);
    if toks[0].s != "universe" {
        return Err(Error::parse(ln, toks[0].col, "expected `universe <points>`"));
    }
    let mut u = Vec::new();
    for &t in &toks[1..] {
        let x: usize = num(ln, t, "a point")?;
        if x >= f.len() || f.get(x) {
            return Err(Error::parse(ln, t.col, format!("{x} is not a zero of f")));
        }
        if u.last().is_some_and(|&p| p >= x) {
            return Err(Error::parse(ln, t.col, "points must be increasing"));
        }
        u.push(x);
    }
    let v = f.ones().collect();
    Ok((Universe { f, u, v }, 2))
}

pub fn parse_sf(text: &str) -> Result<SemiFilterSet> {
    let ls: Vec<(usize, &str)> = lines(text).collect();
    let (uni, start) = parse_universe(&ls)?;
    let k = uni.size();
    let mut filters = Vec::new();
    for &(ln, l) in &ls[start..] {
        let toks = tokens(l);
        if toks[0].s != "sf" {
            return Err(Error::parse(ln, toks[0].col, "expected `sf <|U|> <hex>`"));
        }
        let kt = need(ln, &toks, 1, "|U|", end_col(l))?;
        if num::<usize>(ln, kt, "|U|")? != k {
            return Err(Error::parse(ln, kt.col, format!("the universe has {k} points")));
        }
        let fam = parse_hex_mask(ln, need(ln, &toks, 2, "family", end_col(l))?, 1 << k)?;
        filters.push(SemiFilter { family: fam });
    }
    SemiFilterSet::new(uni, filters).map_err(|e| match e {
        Error::Precondition(m) => Error::parse(1, 1, m),
        e => e,
    })
}

/// Pair covers: the function and universe, then `pair <A> <B>` lines with
/// subsets of U in hex.
pub fn emit_pairs(uni: &Universe, pc: &PairCover) -> String {
    let mut s = emit_tt(&uni.f);
    let pts: Vec<String> = uni.u.iter().map(|x| x.to_string()).collect();
    writeln!(s, "universe {}", pts.join(" ")).unwrap();
    for &(a, b) in &pc.pairs {
        writeln!(s, "pair {} {}", subset_hex(a as u64, uni.size()), subset_hex(b as u64, uni.size())).unwrap();
    }
    s
}

pub fn parse_pairs(text: &str) -> Result<(Universe, PairCover)> {
    let ls: Vec<(usize, &str)> = lines(text).collect();
    let (uni, start) = parse_universe(&ls)?;
    let mut pairs = Vec::new();
    for &(ln, l) in &ls[start..] {
        let toks = tokens(l);
        if toks[0].s != "pair" || toks.len() != 3 {
            return Err(Error::parse(ln, toks[0].col, "expected `pair <A> <B>`"));
        }
        let a = parse_hex_mask(ln, toks[1], uni.size())? as Subset;
        let b = parse_hex_mask(ln, toks[2], uni.size())? as Subset;
        pairs.push((a, b));
    }
    Ok((uni, PairCover { pairs }))
}

pub fn emit_tuple_cover(uni: &Universe, tc: &TupleCover) -> String {
    let mut s = emit_tt(&uni.f);
    let pts: Vec<String> = uni.u.iter().map(|x| x.to_string()).collect();
    writeln!(s, "universe {}", pts.join(" ")).unwrap();
    for t in &tc.tuples {
        let v: Vec<String> = t.iter().map(|&a| subset_hex(a as u64, uni.size())).collect();
        writeln!(s, "tuple {}", v.join(" ")).unwrap();
    }
    s
}

pub fn parse_tuple_cover(text: &str) -> Result<(Universe, TupleCover)> {
    let ls: Vec<(usize, &str)> = lines(text).collect();
    let (uni, start) = parse_universe(&ls)?;
    let mut tuples = Vec::new();
    for &(ln, l) in &ls[start..] {
        let toks = tokens(l);
        if toks[0].s != "tuple" {
            return Err(Error::parse(ln, toks[0].col, "expected `tuple <A1> .. <At>`"));
        }
        let mut t = toks[1..]
            .iter()
            .map(|&x| parse_hex_mask(ln, x, uni.size()).map(|v| v as Subset))
            .collect::<Result<Vec<_>>>()?;
        t.sort_unstable();
        tuples.push(t);
    }
    Ok((uni, TupleCover { tuples }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::CircuitBuilder;
    use crate::fusion::enumerate_semifilters;

    #[test]
    fn tt_round_trip_and_errors() {
        let t = parse_tt("tt 2 6\n").unwrap();
        assert_eq!(emit_tt(&t), "tt 2 6\n");
        assert_eq!(load_tt("3:e8").unwrap().to_hex(), "e8");
        match parse_tt("tt 2 6z") {
            Err(Error::Parse { line: 1, col, .. }) => assert!(col >= 6),
            r => panic!("{r:?}"),
        }
        assert!(matches!(parse_tt("tt 2 1ff"), Err(Error::Parse { .. })));
    }

    #[test]
    fn circuit_round_trip() {
        let mut b = CircuitBuilder::tree(3);
        let (x, y, z) = (b.input(0), b.input(1), b.input(2));
        let a = b.and2(x, y);
        let o = b.apply(Connective::Oracle(TruthTable::from_hex(2, "7").unwrap()), vec![a, z]);
        let k = b.constant(true);
        let out = b.apply(Connective::Xor(2), vec![o, k]);
        let c = b.finish(out);
        let text = emit_circuit(&c);
        let back = parse_circuit(&text).unwrap();
        assert_eq!(back, c);
        assert_eq!(emit_circuit(&back), text);
    }

    #[test]
    fn dangling_gate_is_named() {
        let text = "g0 = INPUT 1\ng1 = AND(g0, g7)\nOUTPUT g1\n";
        match parse_circuit(text) {
            Err(Error::Parse { line: 2, col, msg }) => {
                assert!(msg.contains("g7"));
                assert_eq!(col, 14);
            }
            r => panic!("{r:?}"),
        }
    }

    #[test]
    fn model_round_trip() {
        let m = gen_rs_poly_model(2, 1, 3);
        let x = m.var_member(0).unwrap();
        let y = m.var_member(1).unwrap();
        m.op(&Connective::And(2), &[x, y]).unwrap();
        let text = emit_model(&m);
        let back = parse_model(&text).unwrap();
        assert_eq!(emit_model(&back), text);
        assert!(back.neg_is_exact && back.is_closed());
    }

    #[test]
    fn sf_round_trip() {
        let f = TruthTable::from_hex(3, "69").unwrap();
        let set = enumerate_semifilters(&Universe::new(&f)).unwrap();
        let text = emit_sf(&set);
        assert_eq!(parse_sf(&text).unwrap(), set);
    }

    #[test]
    fn pairs_and_tuples_round_trip() {
        let f = TruthTable::from_hex(2, "8").unwrap();
        let uni = Universe::new(&f);
        let pc = PairCover { pairs: vec![(1, 2), (3, 4)] };
        let (u2, p2) = parse_pairs(&emit_pairs(&uni, &pc)).unwrap();
        assert_eq!((u2, p2), (uni.clone(), pc));
        let tc = TupleCover { tuples: vec![vec![1, 2, 4]] };
        assert_eq!(parse_tuple_cover(&emit_tuple_cover(&uni, &tc)).unwrap().1, tc);
    }

    #[test]
    fn cert_round_trip() {
        let c = CoverCertificate {
            mode: CertMode::Asymmetric,
            g: 3,
            tuples: vec![
                CertTuple { side: Some(Side::Plus), key: crate::model::OpKey::new(Connective::And(2), vec![1, 2]) },
                CertTuple { side: Some(Side::Minus), key: crate::model::OpKey::new(Connective::Or(2), vec![0, 2]) },
            ],
        };
        assert_eq!(parse_cert(&emit_cert(&c)).unwrap(), c);
    }

    #[test]
    fn oracle_errors_point_into_the_table() {
        let text = "g0 = INPUT 1\ng1 = INPUT 2\ng2 = ORACLE[tt 2 7q](g0, g1)\nOUTPUT g2\n";
        match parse_circuit(text) {
            Err(Error::Parse { line: 3, col, .. }) => assert!((13..=20).contains(&col), "{col}"),
            r => panic!("{r:?}"),
        }
    }
}

//! Named, re-runnable experiments. A preset takes only a base seed and
//! renders the same report on every run.

use crate::barrier::{build_d_g_frame, positions_cover_check, verify_distr_lemma, Frame};
use crate::circuit::CircuitBuilder;
use crate::connective::{standard_basis, Connective};
use crate::distance::{
    build_pool, cert_from_circuit, rho_exact, rho_probabilistic, verify_cover, verify_depth_cover, CertMode,
    InputDistribution, Pool, RhoBudget, RhoValue, Q,
};
use crate::enumerate::{enumerate_circuits, min_circuit_size, visit_circuits, EnumSpec, MinSize};
use crate::error::{Error, Result};
use crate::fusion::{
    anticheckers, enumerate_dsemifilters, enumerate_semifilters, extract_circuit, extract_depth_circuit,
    fz_closure, is_antichecker_set, rho_f0, rho_f0_d_t, small_tables, PairUniverse, SemiFilterSet, Universe,
};
use crate::localize::{localize_depth, localize_general, localize_general_with};
use crate::model::{gen_exact_model, gen_fusion_model, gen_rs_poly_model, ApproxModel};
use crate::report::Report;
use crate::truth_table::{all_functions, TruthTable};
use std::collections::BTreeSet;

pub const DEFAULT_SEED: u64 = 1;

pub struct Preset {
    pub name: &'static str,
    pub about: &'static str,
    run: fn(u64) -> Result<Report>,
}

pub const PRESETS: &[Preset] = &[
    Preset { name: "prop1-n2", about: "circuit certificates at n=2, size <= 5", run: prop1_n2 },
    Preset { name: "lemma1-n2", about: "exact h/δ inequality for every f in F_2", run: lemma1_n2 },
    Preset { name: "claim1-n2", about: "every D̄_g error sits on a canonical position", run: claim1_n2 },
    Preset { name: "theorem1-n2", about: "probabilistic distance against 12(n0+1) and ρ", run: theorem1_n2 },
    Preset { name: "lemma2-n3", about: "depth-d h/δ inequality at n=3, d in {1,2}", run: lemma2_n3 },
    Preset { name: "fusion-soundness-n2", about: "ρ_F∀(f) <= 2 · size(f) on F_2", run: fusion_soundness_n2 },
    Preset { name: "fusion-loop-and2", about: "cover, closure and extraction for AND2", run: |_| fusion_loop("and2", "8") },
    Preset { name: "fusion-loop-or2", about: "cover, closure and extraction for OR2", run: |_| fusion_loop("or2", "e") },
    Preset { name: "fusion-loop-xor2", about: "cover, closure and extraction for XOR2", run: |_| fusion_loop("xor2", "6") },
    Preset { name: "fusion-model-and2", about: "ρ in the fusion model against ρ_F0", run: |_| fusion_model_and2() },
    Preset { name: "anticheckers-xor2", about: "minimum antichecker set for XOR2, s=3", run: |_| anticheckers_xor2() },
    Preset { name: "depth-fusion-and2", about: "ρ_F0,d,t and depth extraction for AND2", run: |_| depth_fusion_and2() },
    Preset { name: "localize-n2", about: "oracle localization at n=2", run: localize_n2 },
];

pub fn find(name: &str) -> Option<&'static Preset> {
    PRESETS.iter().find(|p| p.name == name)
}

pub fn run_preset(name: &str, seed: u64) -> Result<Report> {
    let p = find(name).ok_or_else(|| Error::UnknownPreset(name.to_string()))?;
    let mut r = (p.run)(seed)?;
    r.trailer.insert(0, ("preset".into(), name.into()));
    r.trailer.insert(1, ("seed".into(), seed.to_string()));
    Ok(r)
}

fn rs_corpus(n: usize, ts: &[usize], seed: u64) -> Vec<ApproxModel> {
    let mut v = Vec::new();
    for &t in ts {
        for s in seed..seed + 3 {
            v.push(gen_rs_poly_model(n, t, s));
        }
    }
    v
}

fn q(v: &Option<Q>) -> String {
    v.map_or("-".into(), |q| q.to_string())
}

fn prop1_n2(seed: u64) -> Result<Report> {
    let mut r = Report::new("circuit certificates, n=2, size <= 5, basis {NOT, AND2, OR2}", &[
        "model", "circuits", "verified", "max_tuples", "max_size", "tight",
    ]);
    let circuits = enumerate_circuits(&EnumSpec::new(2, standard_basis(), 5))?;
    let mut models = vec![gen_exact_model(2)];
    models.extend(rs_corpus(2, &[1], seed));
    let mut all_ok = true;
    for m in &models {
        let (mut verified, mut max_t, mut max_s, mut tight) = (0, 0, 0, 0);
        for c in &circuits {
            let f = c.truth_table();
            let cert = cert_from_circuit(&f, m, c)?;
            let ok = verify_cover(&f, m, &cert)?.ok() && cert.size() <= c.size();
            verified += ok as usize;
            max_t = max_t.max(cert.size());
            max_s = max_s.max(c.size());
            tight += (cert.size() == c.size()) as usize;
        }
        all_ok &= r.check(verified == circuits.len());
        r.row([m.name().to_string(), circuits.len().to_string(), verified.to_string(), max_t.to_string(),
            max_s.to_string(), tight.to_string()]);
    }
    r.kv("circuits", circuits.len());
    r.kv("models", models.len());
    r.kv("all_verified", all_ok);
    Ok(r)
}

fn lemma1_n2(seed: u64) -> Result<Report> {
    let mut r = Report::new("Pr[h(x) != f(x)] <= 12(n0+1) Pr[x in δ], all f in F_2", &[
        "model", "functions", "pass", "max_ratio", "worst_f", "factor",
    ]);
    let mut checked = 0;
    for m in rs_corpus(2, &[1, 2], seed) {
        let (mut pass, mut worst): (usize, Option<(Q, TruthTable, usize)>) = (0, None);
        for f in all_functions(2) {
            let lr = verify_distr_lemma(&m, &f, None)?;
            checked += 1;
            pass += r.check(lr.pass()) as usize;
            if let Some(x) = lr.max_ratio {
                let rel = x / Q::from_integer(lr.factor as i128);
                if worst.as_ref().map_or(true, |(w, _, _)| rel > *w) {
                    worst = Some((rel, f.clone(), lr.factor));
                }
            }
        }
        let (ratio, wf, fac) = match &worst {
            Some((rel, f, fac)) => ((rel * Q::from_integer(*fac as i128)).to_string(), f.to_hex(), fac.to_string()),
            None => ("-".into(), "-".into(), "-".into()),
        };
        r.row([m.name().to_string(), "16".into(), pass.to_string(), ratio, wf, fac]);
    }
    r.kv("checked", checked);
    Ok(r)
}

fn claim1_n2(seed: u64) -> Result<Report> {
    let m = gen_rs_poly_model(2, 1, seed);
    let mut r = Report::new(format!("D̄_g error positions, n=2, model {}", m.name()), &["type", "rank", "errors"]);
    let mut errors = 0;
    let mut triples = 0;
    let mut by_pos = std::collections::BTreeMap::new();
    for f in all_functions(2) {
        for g in all_functions(2) {
            for x in 0..4 {
                triples += 1;
                match positions_cover_check(&m, &f, &g, x) {
                    Ok(w) => {
                        errors += 1;
                        r.check(w.positions == 27 && w.rank < 27);
                        *by_pos.entry((w.ty.to_string(), w.rank)).or_insert(0usize) += 1;
                    }
                    Err(Error::Precondition(_)) => {}
                    Err(e) => {
                        r.check(false);
                        r.note(format!("f={f} g={g} x={x}: {e}"));
                    }
                }
            }
        }
    }
    for ((ty, rank), k) in &by_pos {
        r.row([ty.clone(), rank.to_string(), k.to_string()]);
    }
    r.kv("triples", triples);
    r.kv("errors", errors);
    r.kv("positions_used", by_pos.len());
    r.kv("canonical_positions", 27);
    Ok(r)
}

fn theorem1_n2(seed: u64) -> Result<Report> {
    let mut r = Report::new("ρ(f,M,uniform) against 12(n0+1) and exact ρ, n=2", &[
        "model", "functions", "max_ρ_prob", "bound_ok", "below_rho", "degenerate",
    ]);
    let mut models = vec![gen_exact_model(2)];
    models.extend(rs_corpus(2, &[1, 2], seed));
    let pool = Pool::Full { basis: standard_basis(), arity_cap: 2 };
    let uni = InputDistribution::uniform(2);
    for m in &models {
        let (mut bound_ok, mut below, mut degenerate, mut max) = (0, 0, 0, None::<Q>);
        for f in all_functions(2) {
            let exact = rho_exact(&f, m, CertMode::Symmetric, &RhoBudget::full(standard_basis(), 2))?;
            match rho_probabilistic(&f, m, &uni, &pool) {
                Ok(p) => {
                    let bound = Q::from_integer(12 * (f.essential_vars().len() as i128 + 1));
                    bound_ok += r.check(p.value <= bound) as usize;
                    let le = match exact.value {
                        RhoValue::Finite(v) => p.value <= Q::from_integer(v as i128),
                        _ => true,
                    };
                    below += r.check(le) as usize;
                    if max.map_or(true, |x| p.value > x) {
                        max = Some(p.value);
                    }
                }
                Err(Error::DegenerateModel(_)) => {
                    // every error set is empty: ρ must be 0 and the ratio is 0/0
                    degenerate += 1;
                    let ok = exact.value == RhoValue::Finite(0);
                    bound_ok += r.check(ok) as usize;
                    below += ok as usize;
                }
                Err(e) => return Err(e),
            }
        }
        r.row([m.name().to_string(), "16".into(), q(&max), bound_ok.to_string(), below.to_string(),
            degenerate.to_string()]);
    }
    r.kv("models", models.len());
    Ok(r)
}

fn lemma2_n3(seed: u64) -> Result<Report> {
    let m = gen_rs_poly_model(3, 1, seed);
    let mut r = Report::new(format!("depth inequality at n=3, model {}", m.name()), &[
        "d", "functions", "pass", "max_ratio", "factor", "dg_depth",
    ]);
    for d in [1, 2] {
        let (mut pass, mut max, mut factor) = (0, None::<Q>, 0);
        for f in all_functions(3) {
            let lr = verify_distr_lemma(&m, &f, Some(d))?;
            pass += r.check(lr.pass()) as usize;
            factor = lr.factor;
            if let Some(x) = lr.max_ratio {
                max = Some(max.map_or(x, |m| m.max(x)));
            }
        }
        let frame = Frame::depth(3, d);
        let mut depths = BTreeSet::new();
        for (f, g) in [("96", "3c"), ("e8", "01"), ("17", "ff")] {
            let f = TruthTable::from_hex(3, f)?;
            let g = TruthTable::from_hex(3, g)?;
            depths.insert(build_d_g_frame(&f, &g, &frame).circuit.depth());
        }
        r.check(depths.len() == 1 && depths.contains(&(2 * d + 3)));
        let dg: Vec<String> = depths.iter().map(|x| x.to_string()).collect();
        r.row([d.to_string(), "256".into(), pass.to_string(), q(&max), factor.to_string(), dg.join(",")]);
    }
    Ok(r)
}

fn min_size(f: &TruthTable) -> Result<usize> {
    match min_circuit_size(f, &standard_basis(), 8, None)? {
        MinSize::Size(s, _) => Ok(s),
        MinSize::ExceedsCap => Err(Error::Precondition(format!("{f} needs more than 8 gates"))),
    }
}

fn fusion_soundness_n2(_: u64) -> Result<Report> {
    let mut r = Report::new("ρ_F∀(f) <= 2 · min size(f), n=2", &["f", "|U|", "|F∀|", "ρ_F∀", "size", "ok"]);
    let mut empty = 0;
    for f in all_functions(2) {
        let all = enumerate_semifilters(&Universe::new(&f))?;
        let rho = rho_f0(&all, PairUniverse::All)?;
        let s = min_size(&f)?;
        let ok = rho.value.is_some_and(|v| v <= 2 * s);
        r.check(ok);
        empty += all.is_empty() as usize;
        let v = rho.value.map_or("inf".into(), |v| v.to_string());
        r.row([f.to_hex(), all.universe.size().to_string(), all.len().to_string(), v, s.to_string(), ok.to_string()]);
    }
    r.kv("functions", 16);
    r.kv("empty_families", empty);
    Ok(r)
}

fn fusion_loop(label: &str, hex: &str) -> Result<Report> {
    let f = TruthTable::from_hex(2, hex)?;
    let uni = Universe::new(&f);
    let all = enumerate_semifilters(&uni)?;
    let rho = rho_f0(&all, PairUniverse::All)?;
    let mut r = Report::new(format!("fusion loop for {label} = {f}"), &["z", "f(z)", "∅ in F_z", "|F_z|"]);
    let Some(v) = rho.value else {
        r.check(false);
        r.note("F∀ has no pair cover");
        return Ok(r);
    };
    for z in 0..f.len() {
        let tr = fz_closure(&uni, &rho.cover, z);
        r.check(tr.verdict == f.get(z));
        r.row([z.to_string(), (f.get(z) as u8).to_string(), (tr.verdict as u8).to_string(),
            tr.fz.count_ones().to_string()]);
    }
    let ex = extract_circuit(&uni, &rho.cover)?;
    let computes = ex.circuit.truth_table() == f;
    r.check(computes);
    r.kv("filters", all.len());
    r.kv("rho_f0", v);
    r.kv("extracted_size", ex.circuit.size());
    r.kv("extracted_computes_f", computes);
    Ok(r)
}

fn pair_sets(all: &SemiFilterSet) -> Vec<SemiFilterSet> {
    let uni = &all.universe;
    let mut out = Vec::new();
    for i in 0..all.len() {
        for j in i + 1..all.len() {
            if all.filters[i].v(uni) != all.filters[j].v(uni) {
                let set = SemiFilterSet { universe: uni.clone(), filters: vec![all.filters[i], all.filters[j]] };
                out.push(set);
            }
        }
    }
    out
}

/// Pairs checked per function when the premise can be met (n=3).
const FUSION_MODEL_PAIRS: usize = 6;

fn fusion_model_and2() -> Result<Report> {
    let mut r = Report::new("ρ(f', fusion model, asym) = ρ_F0(f) for 2-element F0 with distinct v", &[
        "f", "|F∀|", "F0 pairs", "checked", "equal",
    ]);
    let basis = vec![Connective::And(2), Connective::Or(2)];
    let and2 = TruthTable::from_hex(2, "8")?;
    let mut fs = vec![and2];
    fs.push(TruthTable::from_hex(3, "69")?);
    fs.push(TruthTable::from_hex(3, "16")?);
    let mut premise_at_and2 = false;
    for (i, f) in fs.iter().enumerate() {
        let all = enumerate_semifilters(&Universe::new(f))?;
        let sets = pair_sets(&all);
        if i == 0 {
            premise_at_and2 = !sets.is_empty();
        }
        let mut equal = 0;
        let checked = sets.len().min(FUSION_MODEL_PAIRS);
        for f0 in sets.iter().take(checked) {
            let fm = gen_fusion_model(f, f0)?;
            let lhs = rho_exact(&fm.f_prime, &fm.model, CertMode::Asymmetric, &RhoBudget::full(basis.clone(), 2))?;
            let rhs = rho_f0(f0, PairUniverse::All)?;
            let same = match (lhs.value, rhs.value) {
                (RhoValue::Finite(a), Some(b)) => a == b,
                (RhoValue::Infinite, None) => true,
                _ => false,
            };
            equal += r.check(same) as usize;
        }
        r.row([format!("{f}"), all.len().to_string(), sets.len().to_string(), checked.to_string(), equal.to_string()]);
    }
    if !premise_at_and2 {
        r.check(false);
        r.note("AND2 has no semi-filter with v(F) in f^-1(1), so no 2-element F0 exists at n=2");
    }
    r.kv("premise_and2", if premise_at_and2 { "satisfiable" } else { "unsatisfiable" });
    Ok(r)
}

fn anticheckers_xor2() -> Result<Report> {
    let f = TruthTable::from_hex(2, "6")?;
    let basis = standard_basis();
    let a = anticheckers(&f, 3, &basis)?;
    let tables = small_tables(2, 3, &basis)?;
    let mut r = Report::new("anticheckers for XOR2, s=3", &["removed", "still_antichecker"]);
    let mut circuits = 0;
    let mut missed = 0;
    visit_circuits(&EnumSpec::new(2, basis.clone(), 3).with_constants(true), |p| {
        circuits += 1;
        if a.points.iter().all(|&x| p.table().get(x) == f.get(x)) {
            missed += 1;
        }
        true
    })?;
    r.check(missed == 0);
    r.check(is_antichecker_set(&f, &a.points, &tables));
    for (i, &x) in a.points.iter().enumerate() {
        let mut s = a.points.clone();
        s.remove(i);
        let still = is_antichecker_set(&f, &s, &tables);
        r.check(!still);
        r.row([x.to_string(), still.to_string()]);
    }
    let pts: Vec<String> = a.points.iter().map(|x| x.to_string()).collect();
    r.kv("S", pts.join(","));
    r.kv("circuits", circuits);
    r.kv("tables", a.tables_checked);
    r.kv("agreeing_circuits", missed);
    Ok(r)
}

fn depth_fusion_and2() -> Result<Report> {
    let (d, t) = (2, 2);
    let f = TruthTable::from_hex(2, "8")?;
    let uni = Universe::new(&f);
    let f0 = enumerate_dsemifilters(&uni, d - 1)?;
    let rho = rho_f0_d_t(&f0, d, t)?;
    let mut r = Report::new("depth fusion for AND2, d=2, t=2", &["tuple"]);
    let Some(v) = rho.value else {
        r.check(false);
        r.note("no tuple cover");
        return Ok(r);
    };
    for tp in &rho.cover.tuples {
        let s: Vec<String> = tp.iter().map(|a| format!("{a:#x}")).collect();
        r.row([s.join(" ")]);
    }
    let ex = extract_depth_circuit(&uni, &rho.cover, d)?;
    let computes = ex.circuit.truth_table() == f;
    r.check(computes && ex.depth <= 2 * d + 1);
    r.kv("filters", f0.len());
    r.kv("rho", v);
    r.kv("depth", ex.depth);
    r.kv("depth_bound", 2 * d + 1);
    r.kv("size", ex.size);
    r.kv("computes_f", computes);
    Ok(r)
}

fn localize_n2(seed: u64) -> Result<Report> {
    let m = gen_rs_poly_model(2, 1, seed);
    let mut r = Report::new(format!("oracle localization, n=2, model {}", m.name()), &[
        "run", "size", "verified", "complete", "ρ_pool",
    ]);
    let circuits = enumerate_circuits(&EnumSpec::new(2, standard_basis(), 3))?;
    let mut same = 0;
    for c in circuits.iter().take(20) {
        let f = c.truth_table();
        let (cert, rep) = localize_general(&m, c, &f)?;
        same += r.check(cert == cert_from_circuit(&f, &m, c)? && rep.complete()) as usize;
    }
    r.kv("k0_circuits", 20);
    r.kv("k0_equal", same);

    let xor = TruthTable::from_hex(2, "6")?;
    let mut b = CircuitBuilder::tree(2);
    let (x, y) = (b.input(0), b.input(1));
    let o = b.apply(Connective::Oracle(xor), vec![x, y]);
    let nx = b.not(x);
    let out = b.or2(o, nx);
    let c = b.finish(out);
    let f = c.truth_table();
    let (full, _) = build_pool(&m, &Pool::Full { basis: standard_basis(), arity_cap: 2 }, None)?;
    let consistent = |cert: &crate::distance::CoverCertificate| -> Result<(bool, String)> {
        let mut keys: Vec<_> = full.iter().map(|e| e.key.clone()).collect();
        keys.extend(cert.keys());
        let budget = RhoBudget { pool: Pool::Explicit(keys), ..RhoBudget::full(standard_basis(), 2) };
        let rho = rho_exact(&f, &m, CertMode::Symmetric, &budget)?;
        let ok = matches!(rho.value, RhoValue::Finite(v) if v <= cert.size());
        Ok((ok, rho.value.to_string()))
    };
    for (label, expand) in [("general", 2), ("general-barrier", 0)] {
        let (cert, rep) = localize_general_with(&m, &c, &f, expand)?;
        let ver = verify_cover(&f, &m, &cert)?.ok();
        let (cons, rho) = consistent(&cert)?;
        r.check(ver && rep.complete() && cons);
        r.row([label.to_string(), cert.size().to_string(), ver.to_string(), rep.complete().to_string(), rho]);
    }
    let (dc, rep) = localize_depth(&m, &c, &f, 2)?;
    let ver = verify_depth_cover(&f, &m, &dc)?.ok();
    let complete = rep.base.complete() && rep.combiner_ok && rep.depth_rows.iter().all(|w| w.witness_depth <= w.bound);
    let (cons, rho) = consistent(&dc.cert)?;
    r.check(ver && complete && cons);
    r.row(["depth d=2".to_string(), dc.cert.size().to_string(), ver.to_string(), complete.to_string(), rho]);
    r.kv("oracle_circuit_f", f);
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_preset_is_an_error() {
        assert!(matches!(run_preset("nope", 1), Err(Error::UnknownPreset(_))));
    }

    #[test]
    fn names_are_unique() {
        let names: BTreeSet<_> = PRESETS.iter().map(|p| p.name).collect();
        assert_eq!(names.len(), PRESETS.len());
    }

    #[test]
    fn fusion_loop_and2_passes_and_repeats() {
        let a = run_preset("fusion-loop-and2", 1).unwrap();
        assert!(a.pass);
        assert_eq!(a.render(false), run_preset("fusion-loop-and2", 1).unwrap().render(false));
    }
}

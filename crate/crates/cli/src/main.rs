use approxlab::barrier::{barrier_cover, barrier_cover_0proj, barrier_cover_depth, positions_cover_check, verify_distr_lemma};
use approxlab::connective::standard_basis;
use approxlab::distance::{
    rho_d_exact, rho_exact, rho_greedy, verify_cover, verify_depth_cover, CertMode, CoverCertificate, DepthBudget,
    Pool, RhoBudget,
};
use approxlab::enumerate::{min_circuit_size, visit_circuits, EnumSpec, MinSize};
use approxlab::formats::{
    emit_cert, emit_circuit, emit_depth_cert, emit_model, emit_pairs, emit_sf, emit_tuple_cover, load_model,
    load_tt, parse_circuit, parse_cert, parse_depth_cert, parse_pairs, parse_sf, parse_tuple_cover,
};
use approxlab::fusion::{
    anticheckers, enumerate_dsemifilters, enumerate_semifilters, extract_circuit, extract_depth_circuit,
    fz_closure, rho_f0, rho_f0_d_t, PairUniverse, Universe,
};
use approxlab::localize::{localize_0proj, localize_depth, localize_general, localize_projective};
use approxlab::model::{check_0_projective, check_projective, ProjectivityVerdict};
use approxlab::presets::{run_preset, DEFAULT_SEED, PRESETS};
use approxlab::report::Report;
use approxlab::{Error, Result, TruthTable};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "approxlab", version, about = "Approximation-method experiments on small Boolean circuits")]
struct Cli {
    /// Print only the key=value trailer.
    #[arg(long, global = true)]
    machine: bool,
    /// Worker threads for parallel searches; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Work cap for exhaustive searches (overrides APPROXLAB_BUDGET).
    #[arg(long, global = true)]
    budget: Option<u128>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Minimum error-set cover distance ρ(f, M).
    Rho(RhoArgs),
    /// Depth-restricted distance ρ_d.
    RhoD(RhoDArgs),
    /// Check a cover certificate against f and a model.
    VerifyCert {
        #[command(flatten)]
        fm: FModel,
        #[arg(long)]
        cert: String,
    },
    /// Barrier constructions: lemma check, covers, error positions.
    #[command(subcommand)]
    Barrier(BarrierCmd),
    /// Semi-filters, pair covers, closures and extraction.
    #[command(subcommand)]
    Fusion(FusionCmd),
    /// Certificate for f from an oracle circuit computing it.
    Localize(LocalizeArgs),
    /// Generate, validate and check approximation models.
    #[command(subcommand)]
    Model(ModelCmd),
    /// Enumerate small circuits and minimum sizes.
    #[command(subcommand)]
    Circuits(CircuitsCmd),
    /// Named reproducible experiments.
    #[command(subcommand)]
    Preset(PresetCmd),
}

#[derive(Args)]
struct FModel {
    /// Truth table: `tt <n> <hex>`, `<n>:<hex>` or a file.
    #[arg(long)]
    f: String,
    /// `gen:exact:<n>`, `gen:rs:<n>:<t>:<seed>`, `gen:fusion:<f>:<F0-file>` or a model file.
    #[arg(long)]
    model: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Sym,
    Asym,
}

impl From<Mode> for CertMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Sym => CertMode::Symmetric,
            Mode::Asym => CertMode::Asymmetric,
        }
    }
}

#[derive(Args)]
struct RhoArgs {
    #[command(flatten)]
    fm: FModel,
    #[arg(long, value_enum, default_value = "sym")]
    mode: Mode,
    /// Compute ρ_d instead, with witnesses of at most --witness-size gates.
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long, conflicts_with = "greedy")]
    exact: bool,
    /// Greedy covers: an upper bound with a verified certificate.
    #[arg(long)]
    greedy: bool,
    /// Largest connective arity in the tuple pool.
    #[arg(long, default_value_t = 2)]
    arity_cap: usize,
    /// Restrict the pool to approximators reachable by circuits of this size.
    #[arg(long)]
    reachable: Option<usize>,
    #[arg(long, default_value_t = 3)]
    witness_size: usize,
    /// Write the certificate here.
    #[arg(long)]
    cert_out: Option<String>,
}

#[derive(Args)]
struct RhoDArgs {
    #[command(flatten)]
    fm: FModel,
    #[arg(long)]
    d: usize,
    #[arg(long, value_enum, default_value = "sym")]
    mode: Mode,
    #[arg(long, default_value_t = 3)]
    witness_size: usize,
    #[arg(long, default_value_t = 2)]
    arity_cap: usize,
    #[arg(long)]
    cert_out: Option<String>,
}

#[derive(Subcommand)]
enum BarrierCmd {
    /// Exact check of Pr[h(x)≠f(x)] ≤ K·Pr[x∈δ] at every x.
    VerifyLemma {
        #[command(flatten)]
        fm: FModel,
        #[arg(long)]
        depth: Option<usize>,
    },
    /// Cover certificate from the barrier construction.
    Cover {
        #[command(flatten)]
        fm: FModel,
        #[arg(long, conflicts_with = "zero_proj")]
        depth: Option<usize>,
        /// Cover on the essential variables only, for 0-projective models.
        #[arg(long = "0proj")]
        zero_proj: bool,
        /// Circuit size of the family used to check 0-projectivity.
        #[arg(long, default_value_t = 2)]
        family_size: usize,
        #[arg(long)]
        cert_out: Option<String>,
    },
    /// Locate the error of D̄_g at x.
    Positions {
        #[command(flatten)]
        fm: FModel,
        #[arg(long)]
        g: String,
        #[arg(long)]
        x: usize,
    },
}

#[derive(Subcommand)]
enum FusionCmd {
    /// All semi-filters F with v(F) ∈ f⁻¹(1).
    Enumerate {
        #[arg(long)]
        f: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Minimum pair cover of F∀ or of a semi-filter file.
    Cover {
        #[arg(long, required_unless_present = "sf")]
        f: Option<String>,
        #[arg(long)]
        sf: Option<String>,
        /// Only pairs of brackets of circuits with at most this many gates.
        #[arg(long)]
        brackets: Option<usize>,
        #[arg(long)]
        out: Option<String>,
    },
    /// F_z and the verdict ∅ ∈ F_z for a pair cover.
    Closure {
        #[arg(long)]
        pairs: String,
        #[arg(long)]
        z: usize,
    },
    /// Circuit built from a pair cover.
    Extract {
        #[arg(long)]
        pairs: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Minimum set on which every circuit of at most s gates errs.
    Anticheckers {
        #[arg(long)]
        f: String,
        #[arg(long)]
        s: usize,
    },
    /// Minimum t-tuple cover of the (d-1)-semifilters.
    Dcover {
        #[arg(long)]
        f: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        t: usize,
        #[arg(long)]
        out: Option<String>,
    },
    /// Depth-d circuit built from a tuple cover.
    Dextract {
        #[arg(long)]
        tuples: String,
        #[arg(long)]
        d: usize,
        #[arg(long)]
        out: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum LocMode {
    General,
    #[value(name = "0proj")]
    ZeroProj,
    Proj,
    Depth,
}

#[derive(Args)]
struct LocalizeArgs {
    /// Defaults to the function the circuit computes.
    #[arg(long)]
    f: Option<String>,
    #[arg(long)]
    model: String,
    #[arg(long)]
    circuit: String,
    #[arg(long, value_enum, default_value = "general")]
    mode: LocMode,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 2)]
    family_size: usize,
    #[arg(long, default_value_t = 64)]
    tuple_cap: usize,
    #[arg(long)]
    cert_out: Option<String>,
}

#[derive(Subcommand)]
enum ModelCmd {
    /// Materialize a model and print it in the model file format.
    Gen {
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Check constants, variables and the op table.
    Validate {
        #[arg(long)]
        model: String,
    },
    /// Test (0-)projectivity on a family of small circuits.
    CheckProj {
        #[arg(long)]
        model: String,
        #[arg(long, default_value_t = 2)]
        family_size: usize,
        #[arg(long, default_value_t = 64)]
        tuple_cap: usize,
        #[arg(long = "zero")]
        zero: bool,
    },
}

#[derive(Subcommand)]
enum CircuitsCmd {
    /// Count circuits over {NOT, AND2, OR2} by size.
    Enum {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        size: usize,
        #[arg(long)]
        depth: Option<usize>,
        #[arg(long)]
        constants: bool,
    },
    /// Least size of a circuit computing f.
    Minsize {
        #[arg(long)]
        f: String,
        #[arg(long, default_value_t = 8)]
        cap: usize,
        #[arg(long)]
        depth: Option<usize>,
    },
}

#[derive(Subcommand)]
enum PresetCmd {
    Run {
        name: String,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
    List,
}

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Precondition(format!("cannot read {path}: {e}")))
}

fn write_out(path: &Option<String>, text: &str, r: &mut Report) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| Error::Precondition(format!("cannot write {p}: {e}")))?;
        r.kv("written", p);
    }
    Ok(())
}

fn cert_rows(r: &mut Report, cert: &CoverCertificate) {
    for t in &cert.tuples {
        let side = t.side.map_or("".to_string(), |s| s.to_string());
        r.row([side, t.key.to_string()]);
    }
}

fn rho(a: RhoArgs) -> Result<Report> {
    let f = load_tt(&a.fm.f)?;
    let m = load_model(&a.fm.model)?;
    if let Some(d) = a.depth {
        return rho_d(RhoDArgs { fm: a.fm, d, mode: a.mode, witness_size: a.witness_size, arity_cap: a.arity_cap, cert_out: a.cert_out });
    }
    let pool = match a.reachable {
        Some(s) => Pool::Reachable {
            family: EnumSpec::new(f.n(), standard_basis(), s),
            basis: standard_basis(),
            arity_cap: a.arity_cap,
        },
        None => Pool::Full { basis: standard_basis(), arity_cap: a.arity_cap },
    };
    let budget = RhoBudget { pool, ..RhoBudget::full(standard_basis(), a.arity_cap) };
    let out = if a.greedy {
        rho_greedy(&f, &m, a.mode.into(), &budget)?
    } else {
        rho_exact(&f, &m, a.mode.into(), &budget)?
    };
    let mut r = Report::new(format!("ρ({f}, {})", m.name()), &["side", "tuple"]);
    r.kv("rho", out.value);
    r.kv("exact", out.exact);
    r.kv("pool", out.pool_size);
    r.kv("candidates", out.candidates);
    if let Some(c) = &out.certificate {
        cert_rows(&mut r, c);
        let ok = verify_cover(&f, &m, c)?.ok();
        r.check(ok);
        r.kv("g", m.member(c.g));
        r.kv("verified", ok);
        write_out(&a.cert_out, &emit_cert(c), &mut r)?;
    }
    Ok(r)
}

fn rho_d(a: RhoDArgs) -> Result<Report> {
    let f = load_tt(&a.fm.f)?;
    let m = load_model(&a.fm.model)?;
    let budget = DepthBudget {
        family: EnumSpec::new(f.n(), standard_basis(), a.witness_size),
        tuple_basis: standard_basis(),
        arity_cap: a.arity_cap,
        cover_cap: None,
    };
    let out = rho_d_exact(&f, &m, a.d, a.mode.into(), &budget)?;
    let mut r = Report::new(format!("ρ_{}({f}, {})", a.d, m.name()), &["side", "tuple"]);
    r.kv("rho_d", out.value);
    r.kv("d", a.d);
    r.kv("pool", out.pool_size);
    r.kv("candidates", out.candidates);
    if let Some(dc) = &out.certificate {
        cert_rows(&mut r, &dc.cert);
        let ok = verify_depth_cover(&f, &m, dc)?.ok();
        r.check(ok);
        r.kv("verified", ok);
        r.kv("g_witness_depth", dc.g_witness.depth());
        write_out(&a.cert_out, &emit_depth_cert(dc), &mut r)?;
    }
    Ok(r)
}

fn verify_cert(fm: FModel, path: &str) -> Result<Report> {
    let f = load_tt(&fm.f)?;
    let m = load_model(&fm.model)?;
    let text = read(path)?;
    let is_depth = text.lines().any(|l| l.trim_start().starts_with("depth "));
    let (check, cert) = if is_depth {
        let dc = parse_depth_cert(&text)?;
        (verify_depth_cover(&f, &m, &dc)?, dc.cert)
    } else {
        let c = parse_cert(&text)?;
        (verify_cover(&f, &m, &c)?, c)
    };
    let mut r = Report::new(format!("certificate {path}"), &["side", "tuple"]);
    cert_rows(&mut r, &cert);
    r.check(check.ok());
    r.kv("size", cert.size());
    r.kv("depth_certificate", is_depth);
    r.kv("uncovered", check.uncovered.map_or("none".into(), |x| x.to_string()));
    if let Some(s) = &check.side_condition {
        r.note(s.clone());
    }
    r.kv("verified", check.ok());
    Ok(r)
}

fn barrier(cmd: BarrierCmd) -> Result<Report> {
    match cmd {
        BarrierCmd::VerifyLemma { fm, depth } => {
            let f = load_tt(&fm.f)?;
            let m = load_model(&fm.model)?;
            let lr = verify_distr_lemma(&m, &f, depth)?;
            let mut r = Report::new(format!("h/δ inequality for {f}, {}", m.name()), &["x", "Pr[h!=f]", "Pr[δ]", "ok"]);
            for row in &lr.rows {
                let ok = row.lhs <= row.mass * approxlab::distance::Q::from_integer(lr.factor as i128);
                r.row([row.x.to_string(), row.lhs.to_string(), row.mass.to_string(), ok.to_string()]);
            }
            r.check(lr.pass());
            r.kv("factor", lr.factor);
            r.kv("types", lr.type_count);
            r.kv("max_ratio", lr.max_ratio.map_or("-".into(), |q| q.to_string()));
            r.kv("witness", lr.witness.map_or("none".into(), |x| x.to_string()));
            Ok(r)
        }
        BarrierCmd::Cover { fm, depth, zero_proj, family_size, cert_out } => {
            let f = load_tt(&fm.f)?;
            let m = load_model(&fm.model)?;
            let mut r = Report::new(format!("barrier cover for {f}, {}", m.name()), &["side", "tuple"]);
            let (cert, base) = if let Some(d) = depth {
                let (dc, rep) = barrier_cover_depth(&m, &f, d)?;
                let ok = verify_depth_cover(&f, &m, &dc)?.ok();
                r.check(ok);
                r.kv("d", d);
                r.kv("cert_depth", rep.cert_depth);
                r.kv("dg_depth", rep.dg_depth);
                r.kv("width", rep.width);
                write_out(&cert_out, &emit_depth_cert(&dc), &mut r)?;
                (dc.cert, rep.base)
            } else if zero_proj {
                let (c, rep) = barrier_cover_0proj(&m, &f, &EnumSpec::new(f.n(), standard_basis(), family_size))?;
                r.kv("classes", rep.classes);
                r.kv("lifted_inputs", rep.lifted_inputs);
                r.kv("n0_squared", rep.n0_squared);
                write_out(&cert_out, &emit_cert(&c), &mut r)?;
                (c, rep.base)
            } else {
                let (c, rep) = barrier_cover(&m, &f)?;
                write_out(&cert_out, &emit_cert(&c), &mut r)?;
                (c, rep)
            };
            cert_rows(&mut r, &cert);
            let ok = verify_cover(&f, &m, &cert)?.ok();
            r.check(ok);
            r.kv("n0", base.n0);
            r.kv("k", base.k);
            r.kv("majority_size", base.majority_size);
            r.kv("case1_points", base.case1_points);
            r.kv("case1_tuples", base.case1_tuples);
            r.kv("case2_points", base.case2_points);
            r.kv("case2_tuples", base.case2_tuples);
            r.kv("types_used", base.types_used);
            r.kv("size", base.size);
            r.kv("constant", base.constant);
            r.kv("verified", ok);
            Ok(r)
        }
        BarrierCmd::Positions { fm, g, x } => {
            let f = load_tt(&fm.f)?;
            let g = load_tt(&g)?;
            let m = load_model(&fm.model)?;
            let w = positions_cover_check(&m, &f, &g, x)?;
            let mut r = Report::new(format!("error of D̄_g at x={x}"), &[]);
            r.kv("gate", w.gate);
            r.kv("rank", w.rank);
            r.kv("positions", w.positions);
            r.kv("type", &w.ty);
            r.kv("tuple", &w.key);
            r.kv("side", w.side);
            r.check(w.rank < w.positions);
            Ok(r)
        }
    }
}

fn fusion(cmd: FusionCmd) -> Result<Report> {
    match cmd {
        FusionCmd::Enumerate { f, out } => {
            let f = load_tt(&f)?;
            let uni = Universe::new(&f);
            let set = enumerate_semifilters(&uni)?;
            let mut r = Report::new(format!("semi-filters of {f}"), &["index", "family", "v"]);
            for (i, sf) in set.filters.iter().enumerate() {
                r.row([i.to_string(), format!("{:x}", sf.family), set.v_of(i).to_string()]);
            }
            r.kv("universe", uni.size());
            r.kv("filters", set.len());
            write_out(&out, &emit_sf(&set), &mut r)?;
            Ok(r)
        }
        FusionCmd::Cover { f, sf, brackets, out } => {
            let set = match (&sf, &f) {
                (Some(p), _) => parse_sf(&read(p)?)?,
                (None, Some(f)) => enumerate_semifilters(&Universe::new(&load_tt(f)?))?,
                (None, None) => unreachable!("clap requires one"),
            };
            let mode = brackets.map_or(PairUniverse::All, |s| PairUniverse::Brackets { size_cap: s });
            let res = rho_f0(&set, mode)?;
            let mut r = Report::new(format!("pair cover of {} semi-filters of {}", set.len(), set.universe.f), &["A", "B"]);
            for &(a, b) in &res.cover.pairs {
                r.row([format!("{a:#x}"), format!("{b:#x}")]);
            }
            r.kv("filters", set.len());
            r.kv("rho_f0", res.value.map_or("inf".into(), |v| v.to_string()));
            r.check(res.value.is_some());
            write_out(&out, &emit_pairs(&set.universe, &res.cover), &mut r)?;
            Ok(r)
        }
        FusionCmd::Closure { pairs, z } => {
            let (uni, pc) = parse_pairs(&read(&pairs)?)?;
            if z >= uni.f.len() {
                return Err(Error::Precondition(format!("z={z} is not a point of {{0,1}}^{}", uni.n())));
            }
            let tr = fz_closure(&uni, &pc, z);
            let mut r = Report::new(format!("F_z for z={z}, f={}", uni.f), &["B", "in F_z"]);
            for (j, &b) in tr.family.iter().enumerate() {
                r.row([format!("{b:#x}"), tr.w.last().map_or(false, |w| w[j]).to_string()]);
            }
            r.check(tr.verdict == uni.f.get(z));
            r.kv("verdict", tr.verdict);
            r.kv("f_z", uni.f.get(z));
            r.kv("fz_size", tr.fz.count_ones());
            Ok(r)
        }
        FusionCmd::Extract { pairs, out } => {
            let (uni, pc) = parse_pairs(&read(&pairs)?)?;
            let ex = extract_circuit(&uni, &pc)?;
            let mut r = Report::new(format!("circuit from {} pairs for {}", pc.len(), uni.f), &[]);
            let computes = ex.circuit.truth_table() == uni.f;
            r.check(computes);
            r.kv("size", ex.circuit.size());
            r.kv("depth", ex.circuit.depth());
            r.kv("family", ex.family_size);
            r.kv("levels", ex.levels);
            r.kv("computes_f", computes);
            write_out(&out, &emit_circuit(&ex.circuit), &mut r)?;
            Ok(r)
        }
        FusionCmd::Anticheckers { f, s } => {
            let f = load_tt(&f)?;
            let a = anticheckers(&f, s, &standard_basis())?;
            let mut r = Report::new(format!("anticheckers for {f}, s={s}"), &["x", "f(x)"]);
            for &x in &a.points {
                r.row([x.to_string(), (f.get(x) as u8).to_string()]);
            }
            let pts: Vec<String> = a.points.iter().map(|x| x.to_string()).collect();
            r.kv("S", pts.join(","));
            r.kv("tables", a.tables_checked);
            Ok(r)
        }
        FusionCmd::Dcover { f, d, t, out } => {
            let f = load_tt(&f)?;
            if d < 2 {
                return Err(Error::Precondition("depth fusion needs d >= 2".into()));
            }
            let uni = Universe::new(&f);
            let f0 = enumerate_dsemifilters(&uni, d - 1)?;
            let res = rho_f0_d_t(&f0, d, t)?;
            let mut r = Report::new(format!("{t}-tuple cover of the {}-semifilters of {f}", d - 1), &["tuple"]);
            for tp in &res.cover.tuples {
                let s: Vec<String> = tp.iter().map(|a| format!("{a:#x}")).collect();
                r.row([s.join(" ")]);
            }
            r.kv("filters", f0.len());
            r.kv("rho", res.value.map_or("inf".into(), |v| v.to_string()));
            r.check(res.value.is_some());
            write_out(&out, &emit_tuple_cover(&uni, &res.cover), &mut r)?;
            Ok(r)
        }
        FusionCmd::Dextract { tuples, d, out } => {
            let (uni, tc) = parse_tuple_cover(&read(&tuples)?)?;
            let ex = extract_depth_circuit(&uni, &tc, d)?;
            let mut r = Report::new(format!("depth-{d} circuit from {} tuples for {}", tc.len(), uni.f), &[]);
            let computes = ex.circuit.truth_table() == uni.f;
            r.check(computes && ex.depth <= 2 * d + 1);
            r.kv("size", ex.size);
            r.kv("depth", ex.depth);
            r.kv("depth_bound", 2 * d + 1);
            r.kv("max_fan_in", ex.max_fan_in);
            r.kv("computes_f", computes);
            write_out(&out, &emit_circuit(&ex.circuit), &mut r)?;
            Ok(r)
        }
    }
}

fn localize(a: LocalizeArgs) -> Result<Report> {
    let m = load_model(&a.model)?;
    let c = parse_circuit(&read(&a.circuit)?)?;
    let f = match &a.f {
        Some(s) => load_tt(s)?,
        None => c.truth_table(),
    };
    let fam = EnumSpec::new(f.n(), standard_basis(), a.family_size);
    let mut r = Report::new(format!("localization of {} for {f}, {}", a.circuit, m.name()), &[]);
    let (cert, base) = match a.mode {
        LocMode::General => localize_general(&m, &c, &f)?,
        LocMode::ZeroProj => localize_0proj(&m, &c, &f, &fam)?,
        LocMode::Proj => localize_projective(&m, &c, &f, &fam, a.tuple_cap)?,
        LocMode::Depth => {
            let (dc, rep) = localize_depth(&m, &c, &f, a.d)?;
            let ok = verify_depth_cover(&f, &m, &dc)?.ok();
            r.check(ok && rep.combiner_ok);
            r.kv("d", rep.d);
            r.kv("cert_depth", dc.d);
            r.kv("combiner_ok", rep.combiner_ok);
            for row in &rep.depth_rows {
                r.check(row.witness_depth <= row.bound);
            }
            write_out(&a.cert_out, &emit_depth_cert(&dc), &mut r)?;
            (dc.cert, rep.base)
        }
    };
    r.note(format!("ledger:\n{base}"));
    let ok = verify_cover(&f, &m, &cert)?.ok();
    r.check(ok && base.complete());
    r.kv("size", cert.size());
    r.kv("oracles", base.k);
    r.kv("complete", base.complete());
    r.kv("within_budget", base.within_budget());
    r.kv("verified", ok);
    if !matches!(a.mode, LocMode::Depth) {
        write_out(&a.cert_out, &emit_cert(&cert), &mut r)?;
    }
    Ok(r)
}

fn model(cmd: ModelCmd) -> Result<Report> {
    match cmd {
        ModelCmd::Gen { spec, out } => {
            let m = load_model(&spec)?;
            if m.is_closed() {
                m.enumerate_error_sets(&standard_basis(), 2)?;
            }
            let text = emit_model(&m);
            let mut r = Report::new(format!("model {}", m.name()), &[]);
            r.kv("n", m.n());
            r.kv("members", m.member_count());
            r.kv("ops", m.op_entries().len());
            r.kv("closed", m.is_closed());
            r.kv("neg_exact", m.neg_is_exact);
            if out.is_none() {
                r.note(format!("\n{text}"));
            }
            write_out(&out, &text, &mut r)?;
            Ok(r)
        }
        ModelCmd::Validate { model } => {
            let m = load_model(&model)?;
            let issues = m.validate(&standard_basis());
            let mut r = Report::new(format!("validation of {}", m.name()), &["issue"]);
            for i in &issues {
                r.row([i.clone()]);
            }
            r.check(issues.is_empty());
            r.kv("members", m.member_count());
            r.kv("issues", issues.len());
            Ok(r)
        }
        ModelCmd::CheckProj { model, family_size, tuple_cap, zero } => {
            let m = load_model(&model)?;
            let fam = EnumSpec::new(m.n(), standard_basis(), family_size);
            let v = if zero { check_0_projective(&m, &fam)? } else { check_projective(&m, &fam, tuple_cap)? };
            let mut r = Report::new(format!("{}projectivity of {}", if zero { "0-" } else { "" }, m.name()), &[]);
            match &v {
                ProjectivityVerdict::Pass { checked } => r.kv("checked", checked),
                ProjectivityVerdict::Fail { circuit, tuple, z, y } => {
                    r.note(format!("counterexample circuit:\n{}", emit_circuit(circuit)));
                    let t: Vec<String> = tuple.iter().map(|i| i.to_string()).collect();
                    r.kv("tuple", t.join(","));
                    r.kv("z", z);
                    r.kv("y", y);
                }
            }
            r.check(v.passed());
            r.kv("projective", v.passed());
            Ok(r)
        }
    }
}

fn circuits(cmd: CircuitsCmd) -> Result<Report> {
    match cmd {
        CircuitsCmd::Enum { n, size, depth, constants } => {
            let spec = EnumSpec::new(n, standard_basis(), size).with_depth(depth).with_constants(constants);
            let mut by_size: BTreeMap<usize, (usize, std::collections::BTreeSet<TruthTable>)> = BTreeMap::new();
            visit_circuits(&spec, |p| {
                let e = by_size.entry(p.size()).or_default();
                e.0 += 1;
                e.1.insert(p.table().clone());
                true
            })?;
            let mut r = Report::new(format!("circuits over n={n} with at most {size} gates"), &["size", "circuits", "tables"]);
            let mut total = 0;
            let mut tables = std::collections::BTreeSet::new();
            for (s, (k, t)) in &by_size {
                r.row([s.to_string(), k.to_string(), t.len().to_string()]);
                total += k;
                tables.extend(t.iter().cloned());
            }
            r.kv("circuits", total);
            r.kv("tables", tables.len());
            Ok(r)
        }
        CircuitsCmd::Minsize { f, cap, depth } => {
            let f = load_tt(&f)?;
            let mut r = Report::new(format!("minimum circuit for {f}"), &[]);
            match min_circuit_size(&f, &standard_basis(), cap, depth)? {
                MinSize::Size(s, c) => {
                    r.kv("size", s);
                    r.kv("depth", c.depth());
                    r.note(format!("witness:\n{}", emit_circuit(&c)));
                }
                MinSize::ExceedsCap => {
                    r.kv("size", format!(">{cap}"));
                    r.check(false);
                }
            }
            Ok(r)
        }
    }
}

fn preset(cmd: PresetCmd) -> Result<Report> {
    match cmd {
        PresetCmd::Run { name, seed } => run_preset(&name, seed),
        PresetCmd::List => {
            let mut r = Report::new("presets", &["name", "about"]);
            for p in PRESETS {
                r.row([p.name, p.about]);
            }
            r.kv("presets", PRESETS.len());
            Ok(r)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Budget { .. } => 3,
        Error::Parse { .. }
        | Error::UnknownPreset(_)
        | Error::Precondition(_)
        | Error::MalformedCertificate(_)
        | Error::MalformedCircuit(_) => 2,
        _ => 1,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(b) = cli.budget {
        std::env::set_var("APPROXLAB_BUDGET", b.to_string());
    }
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t.max(1)).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let res = match cli.cmd {
        Cmd::Rho(a) => rho(a),
        Cmd::RhoD(a) => rho_d(a),
        Cmd::VerifyCert { fm, cert } => verify_cert(fm, &cert),
        Cmd::Barrier(c) => barrier(c),
        Cmd::Fusion(c) => fusion(c),
        Cmd::Localize(a) => localize(a),
        Cmd::Model(c) => model(c),
        Cmd::Circuits(c) => circuits(c),
        Cmd::Preset(c) => preset(c),
    };
    match res {
        Ok(r) => {
            print!("{}", r.render(cli.machine));
            ExitCode::from(if r.pass { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

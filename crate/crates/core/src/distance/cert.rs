use crate::circuit::Circuit;
use crate::error::{Error, Result};
use crate::model::{ApproxModel, MemberId, OpKey};
use crate::truth_table::TruthTable;
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum CertMode {
    /// f ⊕ g is covered by the union of the δ's.
    Symmetric,
    /// f \ g by the δ⁺'s of the `+` tuples and g \ f by the δ⁻'s of the
    /// `-` tuples. The size is the number of distinct tuples.
    Asymmetric,
}

impl fmt::Display for CertMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CertMode::Symmetric => "sym",
            CertMode::Asymmetric => "asym",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Side {
    Plus,
    Minus,
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Side::Plus => "+",
            Side::Minus => "-",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CertTuple {
    /// None in symmetric certificates.
    pub side: Option<Side>,
    pub key: OpKey,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCertificate {
    pub mode: CertMode,
    pub g: MemberId,
    pub tuples: Vec<CertTuple>,
}

impl CoverCertificate {
    pub fn symmetric(g: MemberId, keys: Vec<OpKey>) -> Self {
        let mut tuples: Vec<CertTuple> = keys.into_iter().map(|key| CertTuple { side: None, key }).collect();
        tuples.sort();
        tuples.dedup();
        CoverCertificate { mode: CertMode::Symmetric, g, tuples }
    }

    /// Number of distinct op-table tuples used.
    pub fn size(&self) -> usize {
        let mut keys: Vec<&OpKey> = self.tuples.iter().map(|t| &t.key).collect();
        keys.sort();
        keys.dedup();
        keys.len()
    }

    pub fn keys(&self) -> Vec<OpKey> {
        let mut keys: Vec<OpKey> = self.tuples.iter().map(|t| t.key.clone()).collect();
        keys.sort();
        keys.dedup();
        keys
    }
}

/// Outcome of a coverage check.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoverCheck {
    /// First point (by index) that no tuple covers.
    pub uncovered: Option<usize>,
    /// A violated depth side condition.
    pub side_condition: Option<String>,
}

impl CoverCheck {
    pub fn ok(&self) -> bool {
        self.uncovered.is_none() && self.side_condition.is_none()
    }
}

fn check_ids(model: &ApproxModel, cert: &CoverCertificate) -> Result<()> {
    let count = model.member_count();
    if cert.g >= count {
        return Err(Error::MalformedCertificate(format!("g={} but the model has {count} members", cert.g)));
    }
    for t in &cert.tuples {
        if let Some(&bad) = t.key.inputs.iter().find(|&&i| i >= count) {
            return Err(Error::MalformedCertificate(format!("tuple {} names member {bad}", t.key)));
        }
        if t.key.inputs.len() != t.key.conn.arity() {
            return Err(Error::MalformedCertificate(format!("tuple {} has the wrong arity", t.key)));
        }
        match (cert.mode, t.side) {
            (CertMode::Symmetric, Some(_)) => {
                return Err(Error::MalformedCertificate(format!("side tag on tuple {} of a symmetric certificate", t.key)))
            }
            (CertMode::Asymmetric, None) => {
                return Err(Error::MalformedCertificate(format!("tuple {} has no side tag", t.key)))
            }
            _ => {}
        }
    }
    Ok(())
}

pub fn verify_cover(f: &TruthTable, model: &ApproxModel, cert: &CoverCertificate) -> Result<CoverCheck> {
    if f.n() != model.n() {
        return Err(Error::Precondition(format!("f has {} variables, model order {}", f.n(), model.n())));
    }
    check_ids(model, cert)?;
    let g = model.member(cert.g);
    let n = f.n();
    let mut plus = TruthTable::zero(n);
    let mut minus = TruthTable::zero(n);
    let mut both = TruthTable::zero(n);
    for t in &cert.tuples {
        let e = model.error_set(&t.key.conn, &t.key.inputs)?;
        match t.side {
            None => both = both.or(&e.delta),
            Some(Side::Plus) => plus = plus.or(&e.delta_plus),
            Some(Side::Minus) => minus = minus.or(&e.delta_minus),
        }
    }
    let missing = match cert.mode {
        CertMode::Symmetric => f.xor(&g).minus(&both),
        CertMode::Asymmetric => f.minus(&g).minus(&plus).or(&g.minus(f).minus(&minus)),
    };
    Ok(CoverCheck { uncovered: missing.first_one(), side_condition: None })
}

/// Tag every tuple of a symmetric certificate with both sides. The result
/// has at most twice as many entries and the same distinct tuples; it is
/// returned only if it verifies, otherwise the first uncovered point is
/// reported.
pub fn to_asymmetric(f: &TruthTable, model: &ApproxModel, cert: &CoverCertificate) -> Result<CoverCertificate> {
    if cert.mode != CertMode::Symmetric {
        return Err(Error::Precondition("certificate is already asymmetric".into()));
    }
    let mut tuples = Vec::with_capacity(2 * cert.tuples.len());
    for t in &cert.tuples {
        for side in [Side::Plus, Side::Minus] {
            tuples.push(CertTuple { side: Some(side), key: t.key.clone() });
        }
    }
    tuples.sort();
    let out = CoverCertificate { mode: CertMode::Asymmetric, g: cert.g, tuples };
    match verify_cover(f, model, &out)?.uncovered {
        None => Ok(out),
        Some(x) => Err(Error::NotACover(format!(
            "point {x} lies in some δ but not in a δ of the side it needs"
        ))),
    }
}

/// The certificate read off a circuit computing f: g is the approximator
/// of the circuit and the tuples are the per-gate tuples on approximated
/// inputs, sorted and deduplicated.
pub fn cert_from_circuit(f: &TruthTable, model: &ApproxModel, c: &Circuit) -> Result<CoverCertificate> {
    if &c.truth_table() != f {
        return Err(Error::Precondition("the circuit does not compute f".into()));
    }
    let approx = model.approximate_gates(c)?;
    let keys = gate_keys(c, &approx);
    Ok(CoverCertificate::symmetric(approx[c.output()], keys))
}

/// Keys of the live non-input gates, given each gate's member.
pub(crate) fn gate_keys(c: &Circuit, approx: &[MemberId]) -> Vec<OpKey> {
    c.live_gates()
        .into_iter()
        .filter_map(|i| match &c.gates()[i] {
            crate::circuit::Gate::Apply(conn, ch) => {
                Some(OpKey::new(conn.clone(), ch.iter().map(|&j| approx[j]).collect()))
            }
            _ => None,
        })
        .collect()
}

/// A cover certificate whose g and tuple inputs come with witness circuits
/// of bounded depth.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DepthCoverCertificate {
    pub cert: CoverCertificate,
    pub d: usize,
    /// Depth at most d, approximating to g.
    pub g_witness: Circuit,
    /// Depth at most d - 1, approximating to each tuple input.
    pub input_witnesses: BTreeMap<MemberId, Circuit>,
}

pub fn verify_depth_cover(f: &TruthTable, model: &ApproxModel, dc: &DepthCoverCertificate) -> Result<CoverCheck> {
    let mut check = verify_cover(f, model, &dc.cert)?;
    check.side_condition = depth_side_condition(model, dc)?;
    Ok(check)
}

fn depth_side_condition(model: &ApproxModel, dc: &DepthCoverCertificate) -> Result<Option<String>> {
    if dc.g_witness.depth() > dc.d {
        return Ok(Some(format!("witness for g has depth {} > {}", dc.g_witness.depth(), dc.d)));
    }
    if model.approximate_circuit(&dc.g_witness)? != dc.cert.g {
        return Ok(Some("witness for g does not approximate to g".into()));
    }
    for t in &dc.cert.tuples {
        for &id in &t.key.inputs {
            let Some(w) = dc.input_witnesses.get(&id) else {
                return Ok(Some(format!("member {id} has no witness circuit")));
            };
            if dc.d == 0 || w.depth() > dc.d - 1 {
                return Ok(Some(format!("witness for member {id} has depth {} >= {}", w.depth(), dc.d)));
            }
            if model.approximate_circuit(w)? != id {
                return Ok(Some(format!("witness for member {id} approximates to another member")));
            }
        }
    }
    Ok(None)
}

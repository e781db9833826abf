//! The α-value certificate behind the n/8 component bound. Each node of the
//! second factor's cycles receives an exact rational weight; cycle sums,
//! per-cycle caps, and the weighted component inequality are then all
//! mechanically checkable. Everything here is exact; no floats.

use std::collections::{BTreeMap, BTreeSet};

use num::BigRational;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::factor::{Cycle, TwoFactor};
use crate::improve::is_violated;
use crate::rational::{rat, rat_int, to_frac_string};

/// Per-node exact weights plus the component counts they certify.
#[derive(Debug, Clone)]
pub struct AlphaCertificate {
    pub alpha: BTreeMap<usize, BigRational>,
    pub k1: usize,
    pub k2: usize,
    pub n: usize,
}

/// Outcome of a full certificate check. Construction via
/// [`check_certificate`] only; any failed clause is an error there.
#[derive(Debug, Clone, Serialize)]
pub struct CertReport {
    /// Per-F1-cycle sums satisfy `sum <= |C|/6 - 1/3`.
    pub star_ok: bool,
    /// Every alpha is at most 1/6.
    pub alpha_cap_ok: bool,
    /// Alphas sum to K2 exactly.
    pub sum_equals_k2: bool,
    /// `K1/4 + 3*K2/4 <= n/8`.
    pub global_ok: bool,
    /// The global inequality holds with equality.
    pub global_tight: bool,
}

/// Assign weights: nodes on a cycle of size k get 1/k, except size-10
/// cycles, which place 1/12 on exactly 8 nodes (covering at least 4 nodes
/// of every F1-cycle that meets them in 4 or more) and 1/6 on the other 2.
pub fn build_alpha_certificate(
    f1: &TwoFactor,
    f2: &TwoFactor,
    n: usize,
) -> Result<AlphaCertificate> {
    for (i, c) in f1.cycles().iter().enumerate() {
        if is_violated(c, f2) {
            return Err(Error::ViolatedCycleExists(i));
        }
    }
    let mut alpha: BTreeMap<usize, BigRational> = BTreeMap::new();
    for d in f2.cycles() {
        if d.len() != 10 {
            let w = rat(1, d.len() as i64);
            for &v in d.nodes() {
                alpha.insert(v, w.clone());
            }
            continue;
        }
        let d_nodes: BTreeSet<usize> = d.nodes().iter().copied().collect();
        let mut marked: BTreeSet<usize> = BTreeSet::new();
        let mut intersectors = 0usize;
        for c in f1.cycles() {
            let shared: Vec<usize> = c
                .nodes()
                .iter()
                .copied()
                .filter(|v| d_nodes.contains(v))
                .collect();
            if shared.len() < 4 {
                continue;
            }
            intersectors += 1;
            if intersectors > 2 {
                return Err(Error::TooManyIntersectors);
            }
            let mut shared = shared;
            shared.sort_unstable();
            marked.extend(shared.into_iter().take(4));
        }
        for &v in &d_nodes {
            if marked.len() == 8 {
                break;
            }
            marked.insert(v);
        }
        debug_assert_eq!(marked.len(), 8);
        let twelfth = rat(1, 12);
        let sixth = rat(1, 6);
        for &v in &d_nodes {
            let w = if marked.contains(&v) {
                twelfth.clone()
            } else {
                sixth.clone()
            };
            alpha.insert(v, w);
        }
    }
    let cap = rat(1, 6);
    if alpha.values().any(|a| a > &cap) {
        return Err(Error::InvariantBreach(
            "alpha exceeds 1/6; the host graph kept a short cycle".into(),
        ));
    }
    Ok(AlphaCertificate {
        alpha,
        k1: f1.component_count(),
        k2: f2.component_count(),
        n,
    })
}

/// Verify a certificate against the F1 cycles it speaks about. All clauses
/// must hold; the error names the first violated one.
pub fn check_certificate(cert: &AlphaCertificate, f1_cycles: &[Cycle]) -> Result<CertReport> {
    let cap = rat(1, 6);
    for (&v, a) in &cert.alpha {
        if a > &cap {
            return Err(Error::CertificateInvalid(format!(
                "alpha({v}) = {} exceeds 1/6",
                to_frac_string(a)
            )));
        }
    }
    for (i, c) in f1_cycles.iter().enumerate() {
        let mut sum = rat(0, 1);
        for &v in c.nodes() {
            let a = cert
                .alpha
                .get(&v)
                .ok_or_else(|| Error::CertificateInvalid(format!("alpha missing for node {v}")))?;
            sum += a;
        }
        let bound = rat_int(c.len()) * rat(1, 6) - rat(1, 3);
        if sum > bound {
            return Err(Error::CertificateInvalid(format!(
                "cycle {i}: sum {} exceeds |C|/6 - 1/3 = {}",
                to_frac_string(&sum),
                to_frac_string(&bound)
            )));
        }
    }
    let total: BigRational = cert.alpha.values().sum();
    if total != rat_int(cert.k2) {
        return Err(Error::CertificateInvalid(format!(
            "alphas sum to {}, not K2 = {}",
            to_frac_string(&total),
            cert.k2
        )));
    }
    let lhs = rat(1, 4) * rat_int(cert.k1) + rat(3, 4) * rat_int(cert.k2);
    let rhs = rat_int(cert.n) * rat(1, 8);
    if lhs > rhs {
        return Err(Error::CertificateInvalid(format!(
            "K1/4 + 3K2/4 = {} exceeds n/8 = {}",
            to_frac_string(&lhs),
            to_frac_string(&rhs)
        )));
    }
    Ok(CertReport {
        star_ok: true,
        alpha_cap_ok: true,
        sum_equals_k2: true,
        global_ok: true,
        global_tight: lhs == rhs,
    })
}

/// Outcome of the plain component-count bound.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ComponentBound {
    pub components: usize,
    pub limit: usize,
    pub satisfied: bool,
    pub margin: i64,
}

/// Check `components(f) <= floor(n/8)` (with a floor of 1 so the check is
/// meaningful below 16 nodes) and report the slack.
pub fn check_component_bound(f: &TwoFactor, n: usize) -> ComponentBound {
    let limit = (n / 8).max(1);
    let components = f.component_count();
    ComponentBound {
        components,
        limit,
        satisfied: components <= limit,
        margin: limit as i64 - components as i64,
    }
}

/// Serialized certificate: rationals as `p/q` strings, node ids shifted by
/// the caller's label offset.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateJson {
    pub alpha: BTreeMap<String, String>,
    pub k1: usize,
    pub k2: usize,
    pub n: usize,
}

impl CertificateJson {
    pub fn from_certificate(cert: &AlphaCertificate, label_offset: usize) -> Self {
        CertificateJson {
            alpha: cert
                .alpha
                .iter()
                .map(|(&v, a)| ((v + label_offset).to_string(), to_frac_string(a)))
                .collect(),
            k1: cert.k1,
            k2: cert.k2,
            n: cert.n,
        }
    }

    pub fn to_certificate(&self, label_offset: usize) -> Result<AlphaCertificate> {
        let mut alpha = BTreeMap::new();
        for (k, v) in &self.alpha {
            let node: usize = k
                .parse()
                .map_err(|_| Error::Parse(format!("bad node key {k:?} in certificate")))?;
            let a = crate::rational::parse_frac(v)
                .ok_or_else(|| Error::Parse(format!("bad rational {v:?} in certificate")))?;
            alpha.insert(node - label_offset, a);
        }
        Ok(AlphaCertificate {
            alpha,
            k1: self.k1,
            k2: self.k2,
            n: self.n,
        })
    }
}

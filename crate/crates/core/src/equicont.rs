use crate::error::{Error, Result};
use crate::field::Field;
use crate::grid::GridSpec;
use crate::norms::{modulation_norm, modulation_tail, ModulationParams};

/// Finite set of fields on a common grid, with `A = sup ||f||_{M^{s,2}_p}`.
#[derive(Clone, Debug)]
pub struct FieldFamily {
    members: Vec<Field>,
    mp: ModulationParams,
    a: f64,
}

impl FieldFamily {
    pub fn new(members: Vec<Field>, mp: ModulationParams) -> Result<Self> {
        mp.validate()?;
        let first = members.first().ok_or(Error::EmptyFamily)?;
        if members.iter().any(|f| f.grid() != first.grid()) {
            return Err(Error::GridMismatch);
        }
        let mut a: f64 = 0.0;
        for f in &members {
            a = a.max(modulation_norm(f, mp, None)?);
        }
        Ok(Self { members, mp, a })
    }

    pub fn members(&self) -> &[Field] {
        &self.members
    }

    pub fn params(&self) -> ModulationParams {
        self.mp
    }

    pub fn sup_norm(&self) -> f64 {
        self.a
    }

    pub fn grid(&self) -> &GridSpec {
        self.members[0].grid()
    }
}

/// Symmetric weights `c_k`, stored for `|k| <= k_max`, with the thresholds
/// `k(m)` they were built from.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    c: Vec<f64>,
    thresholds: Vec<i64>,
}

impl WeightSequence {
    /// `c_k = (#{m : k(m) < |k|} + 1)^{1/p}` for `|k| <= k_max`.
    pub fn from_thresholds(thresholds: Vec<i64>, p: f64, k_max: i64) -> Self {
        let c = (0..=k_max)
            .map(|k| {
                let count = thresholds.iter().filter(|&&t| t < k).count();
                ((count + 1) as f64).powf(1.0 / p)
            })
            .collect();
        Self { c, thresholds }
    }

    /// Weights given directly by `c(|k|)`; no thresholds recorded.
    pub fn from_fn(k_max: i64, c: impl Fn(i64) -> f64) -> Self {
        Self { c: (0..=k_max).map(c).collect(), thresholds: Vec::new() }
    }

    pub fn constant(k_max: i64) -> Self {
        Self::from_fn(k_max, |_| 1.0)
    }

    pub fn k_max(&self) -> i64 {
        self.c.len() as i64 - 1
    }

    /// `c_k`; `k` must satisfy `|k| <= k_max`.
    pub fn get(&self, k: i64) -> f64 {
        self.c[k.unsigned_abs() as usize]
    }

    pub fn thresholds(&self) -> &[i64] {
        &self.thresholds
    }

    /// Thresholds strictly inside the window, i.e. the ones that raise some `c_k`.
    pub fn active_thresholds(&self) -> usize {
        self.thresholds.iter().filter(|&&t| t < self.k_max()).count()
    }
}

/// `sup_f || <k>^s ||P_k f|| ||_{l^p(|k| >= K)}` over the family.
pub fn equicontinuity_tail(q: &FieldFamily, k_from: i64) -> f64 {
    q.members.iter().map(|f| modulation_tail(f, q.mp, k_from)).fold(0.0, f64::max)
}

/// Relative size of the tail at the window edge that still counts as resolved.
pub const EDGE_TAIL_FLOOR: f64 = 1e-8;

/// Smallest first threshold. With `k(1) >= 4` every threshold satisfies
/// `k(m) >= 4^m`, which keeps `c_k <= 1 + log(|k| + 1)` for every `p >= 1`.
pub const FIRST_THRESHOLD_MIN: i64 = 4;

/// Greedy thresholds: `k(m)` is the smallest integer with `k(m) >= 4 k(m-1)`
/// (and `k(1) >= 4`) such that the family tail beyond `k(m)` satisfies
/// `tail^p <= 2^{-m} A^p`. Thresholds are generated until one reaches the
/// window edge.
pub fn build_weights(q: &FieldFamily) -> Result<WeightSequence> {
    let k_max = q.grid().k_max();
    let a = q.a;
    let edge = equicontinuity_tail(q, k_max);
    if edge > EDGE_TAIL_FLOOR * a {
        return Err(Error::NotEquicontinuous { tail: edge, floor: EDGE_TAIL_FLOOR * a });
    }
    let p = q.mp.p;
    // tails[k] = sup tail over |k'| > k, i.e. starting at k + 1.
    let tails: Vec<f64> = (0..=k_max).map(|k| equicontinuity_tail(q, k + 1)).collect();
    let mut thresholds = Vec::new();
    let mut lower = FIRST_THRESHOLD_MIN;
    let mut m = 1;
    loop {
        let budget = 0.5f64.powi(m) * a.powf(p);
        let minimal = (0..=k_max).find(|&k| tails[k as usize].powf(p) <= budget).unwrap_or(k_max);
        let k_m = minimal.max(lower);
        thresholds.push(k_m);
        if k_m >= k_max {
            break;
        }
        lower = 4 * k_m;
        m += 1;
    }
    Ok(WeightSequence::from_thresholds(thresholds, p, k_max))
}

/// Outcome of checking the five weight properties on a family.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightReport {
    /// `1 <= c_k = c_{-k} <= 1 + log(|k| + 1)`.
    pub bounds: bool,
    /// `c_{4|k|} <= c_{|k|} + 1` wherever both lie in the window.
    pub quadrupling: bool,
    /// `c_{|k|} <= c_{|k|+1}`.
    pub monotone: bool,
    /// Finite-window reading of `c_k -> infinity`: the edge weight exceeds `c_0`.
    pub grows: bool,
    /// `sup_f ||f||_{weighted} <= 2^{1/p} A`.
    pub aksup: bool,
    /// Measured `sup_f ||f||_{weighted} / A`.
    pub aksup_ratio: f64,
}

impl WeightReport {
    pub fn all(&self) -> bool {
        self.bounds && self.quadrupling && self.monotone && self.grows && self.aksup
    }
}

pub fn verify_weights(w: &WeightSequence, q: &FieldFamily) -> Result<WeightReport> {
    let k_max = w.k_max();
    let bounds = (0..=k_max).all(|k| {
        let c = w.get(k);
        c >= 1.0 && c == w.get(-k) && c <= 1.0 + ((k + 1) as f64).ln()
    });
    let quadrupling = (0..=k_max / 4).all(|k| w.get(4 * k) <= w.get(k) + 1.0);
    let monotone = (0..k_max).all(|k| w.get(k) <= w.get(k + 1));
    let grows = w.get(k_max) > w.get(0);
    let mut sup: f64 = 0.0;
    for f in &q.members {
        sup = sup.max(modulation_norm(f, q.mp, Some(w))?);
    }
    let aksup_ratio = if q.a == 0.0 { 1.0 } else { sup / q.a };
    let aksup = sup <= 2f64.powf(1.0 / q.mp.p) * q.a * (1.0 + 1e-12);
    Ok(WeightReport { bounds, quadrupling, monotone, grows, aksup, aksup_ratio })
}

/// Property (iv) across two resolutions: the larger window holds more thresholds.
pub fn grows_with_window(small: &WeightSequence, large: &WeightSequence) -> bool {
    large.k_max() > small.k_max() && large.active_thresholds() > small.active_thresholds()
}

use std::f64::consts::PI;
use std::ops::Range;

use crate::error::{Error, Result};

/// Periodic box `[-L, L)` sampled at `N` points, with its dual frequency lattice.
///
/// Spectral arrays are stored in centered order: index `m` holds the frequency
/// `xi_m = (m - N/2) * pi / L`, so index 0 is the unpaired Nyquist mode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    n: usize,
    l: f64,
}

impl GridSpec {
    pub fn new(n: usize, l: f64) -> Result<Self> {
        if n < 16 || !n.is_power_of_two() {
            return Err(Error::GridSize(n));
        }
        if !(l > 0.0 && l.is_finite()) {
            return Err(Error::HalfLength(l));
        }
        Ok(Self { n, l })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn half_length(&self) -> f64 {
        self.l
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.n as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.l
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.x(i)).collect()
    }

    /// Signed lattice index `j` of centered position `m`.
    pub fn lattice_index(&self, m: usize) -> i64 {
        m as i64 - (self.n / 2) as i64
    }

    /// Centered position of lattice index `j`, if it lies on the lattice.
    pub fn position(&self, j: i64) -> Option<usize> {
        let m = j + (self.n / 2) as i64;
        (0..self.n as i64).contains(&m).then_some(m as usize)
    }

    pub fn xi(&self, m: usize) -> f64 {
        self.lattice_index(m) as f64 * self.dxi()
    }

    pub fn xis(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.xi(m)).collect()
    }

    /// Largest positive lattice frequency.
    pub fn xi_max(&self) -> f64 {
        (self.n / 2 - 1) as f64 * self.dxi()
    }

    /// Largest `k` whose band `[k - 1/2, k + 1/2)` fits inside the lattice.
    pub fn k_max(&self) -> i64 {
        (self.xi_max() - 0.5).floor() as i64
    }

    pub fn resolved_bands(&self) -> std::ops::RangeInclusive<i64> {
        -self.k_max()..=self.k_max()
    }

    /// Band containing frequency `xi`.
    pub fn band_of(xi: f64) -> i64 {
        (xi + 0.5).floor() as i64
    }

    /// Centered positions whose frequency lies in band `k`; empty outside the lattice.
    pub fn band_range(&self, k: i64) -> Range<usize> {
        let lo = self.first_position_with_band_at_least(k);
        let hi = self.first_position_with_band_at_least(k + 1);
        lo..hi
    }

    fn first_position_with_band_at_least(&self, k: i64) -> usize {
        // Band index is monotone in m, so a binary search is exact.
        let (mut lo, mut hi) = (0usize, self.n);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if Self::band_of(self.xi(mid)) < k {
                lo = mid + 1;
            } else {
                hi = mid;
            }
        }
        lo
    }

    pub fn check_band(&self, k: i64) -> Result<()> {
        if k.abs() > self.k_max() {
            Err(Error::UnresolvedBand { k, k_max: self.k_max() })
        } else {
            Ok(())
        }
    }

    /// Same point count on the box `[-lambda L, lambda L)`.
    pub fn rescaled(&self, lambda: f64) -> Result<Self> {
        Self::new(self.n, self.l * lambda)
    }
}

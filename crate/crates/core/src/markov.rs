//! Inverse-branch families of expanding Markov interval maps.
//!
//! Two concrete instances: the Gauss map `x -> 1/x mod 1` with inverse
//! branches `T_a(x) = 1/(x + a)`, and the (truncated) Lüroth map with affine
//! inverse branches `T_a(x) = (x + a)/(a(a+1))`. The Gauss branches carry the
//! uniform distortion bound `|T''_w / T'_w| <= 2`; the Lüroth ones are the
//! zero-distortion control.

use serde::{Deserialize, Serialize};

use crate::error::{GfError, Result};
use crate::word::Word;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MapKind {
    Gauss,
    Lueroth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MarkovSystem {
    pub kind: MapKind,
    /// Largest admissible digit; the countable alphabet is truncated here.
    pub alphabet_cutoff: u32,
}

impl MarkovSystem {
    pub fn new(kind: MapKind, alphabet_cutoff: u32) -> Result<Self> {
        if alphabet_cutoff == 0 {
            return Err(GfError::Domain("alphabet cutoff must be >= 1".into()));
        }
        Ok(MarkovSystem { kind, alphabet_cutoff })
    }

    pub fn gauss(alphabet_cutoff: u32) -> Self {
        MarkovSystem { kind: MapKind::Gauss, alphabet_cutoff }
    }

    pub fn lueroth(alphabet_cutoff: u32) -> Self {
        MarkovSystem { kind: MapKind::Lueroth, alphabet_cutoff }
    }

    /// Uniform bound on `|T''_w / T'_w|` over all words and points.
    pub fn distortion_bound(&self) -> f64 {
        match self.kind {
            MapKind::Gauss => 2.0,
            MapKind::Lueroth => 0.0,
        }
    }

    fn check_digit(&self, a: u32) -> Result<()> {
        if a == 0 || a > self.alphabet_cutoff {
            return Err(GfError::Domain(format!(
                "digit {a} outside alphabet 1..={}",
                self.alphabet_cutoff
            )));
        }
        Ok(())
    }

    fn check_point(&self, x: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&x) {
            return Err(GfError::Domain(format!("point {x} outside [0,1]")));
        }
        Ok(())
    }

    /// Single branch value, first and second derivative at `x`.
    pub fn branch(&self, a: u32, x: f64) -> Result<(f64, f64, f64)> {
        self.check_digit(a)?;
        self.check_point(x)?;
        Ok(match self.kind {
            MapKind::Gauss => {
                let d = x + a as f64;
                (1.0 / d, -1.0 / (d * d), 2.0 / (d * d * d))
            }
            MapKind::Lueroth => {
                let s = 1.0 / (a as f64 * (a as f64 + 1.0));
                ((x + a as f64) * s, s, 0.0)
            }
        })
    }

    /// `T_w(x)`, the right-to-left branch composition. Backward evaluation
    /// is numerically stable for arbitrary word lengths.
    pub fn branch_point(&self, w: &Word, x: f64) -> Result<f64> {
        self.check_point(x)?;
        let mut v = x;
        for &a in w.digits().iter().rev() {
            v = self.branch(a, v)?.0;
        }
        Ok(v)
    }

    /// Signed `T_w'(x)` via the chain-rule product. Underflows to signed
    /// zero for very long words; use [`Self::log_branch_derivative_abs`]
    /// for those.
    pub fn branch_derivative(&self, w: &Word, x: f64) -> Result<f64> {
        if w.len() <= 20 {
            // direct product along the composition
            self.check_point(x)?;
            let mut v = x;
            let mut d = 1.0;
            for &a in w.digits().iter().rev() {
                let (t, t1, _) = self.branch(a, v)?;
                d *= t1;
                v = t;
            }
            Ok(d)
        } else {
            // closed form in log-space to dodge product underflow
            let lg = self.log_branch_derivative_abs(w, x)?;
            Ok(self.derivative_sign(w) * lg.exp())
        }
    }

    pub fn derivative_sign(&self, w: &Word) -> f64 {
        match self.kind {
            MapKind::Gauss => {
                if w.len() % 2 == 0 {
                    1.0
                } else {
                    -1.0
                }
            }
            MapKind::Lueroth => 1.0,
        }
    }

    /// `log |T_w'(x)|`, stable for any word length.
    ///
    /// Gauss: `|T_w'(x)| = (q_{n-1} x + q_n)^{-2}`; the continuant growth is
    /// tracked through the ratio recurrence `r_k = a_k + 1/r_{k-1}` so only
    /// `log q_n` and `t_n = q_{n-1}/q_n` are held in floating point.
    pub fn log_branch_derivative_abs(&self, w: &Word, x: f64) -> Result<f64> {
        self.check_point(x)?;
        for &a in w.digits() {
            self.check_digit(a)?;
        }
        match self.kind {
            MapKind::Gauss => {
                let g = GaussGrowth::of(w);
                Ok(-2.0 * (g.log_q + (g.t * x).ln_1p()))
            }
            MapKind::Lueroth => {
                let mut s = 0.0;
                for &a in w.digits() {
                    s -= (a as f64 * (a as f64 + 1.0)).ln();
                }
                Ok(s)
            }
        }
    }

    /// `T_w''(x) / T_w'(x)`; magnitude bounded by [`Self::distortion_bound`].
    pub fn distortion(&self, w: &Word, x: f64) -> Result<f64> {
        self.check_point(x)?;
        for &a in w.digits() {
            self.check_digit(a)?;
        }
        match self.kind {
            MapKind::Gauss => {
                // -2 q_{n-1} / (q_{n-1} x + q_n), reduced by q_n
                let g = GaussGrowth::of(w);
                Ok(-2.0 * g.t / (g.t * x + 1.0))
            }
            MapKind::Lueroth => Ok(0.0),
        }
    }

    /// Cylinder `I_w = T_w([0,1])` with sorted endpoints; the empty word
    /// maps to `[0,1]` by convention.
    pub fn cylinder(&self, w: &Word) -> Result<(f64, f64)> {
        let a = self.branch_point(w, 0.0)?;
        let b = self.branch_point(w, 1.0)?;
        Ok(if a <= b { (a, b) } else { (b, a) })
    }

    pub fn cylinder_midpoint(&self, w: &Word) -> Result<f64> {
        let (lo, hi) = self.cylinder(w)?;
        Ok(0.5 * (lo + hi))
    }

    /// `log |I_w|`, stable for any word length.
    pub fn log_cylinder_length(&self, w: &Word) -> Result<f64> {
        if w.is_empty() {
            return Ok(0.0);
        }
        for &a in w.digits() {
            self.check_digit(a)?;
        }
        match self.kind {
            MapKind::Gauss => {
                // |I_w| = 1/(q_n (q_n + q_{n-1}))
                let g = GaussGrowth::of(w);
                Ok(-(2.0 * g.log_q + g.t.ln_1p()))
            }
            MapKind::Lueroth => self.log_branch_derivative_abs(w, 0.0),
        }
    }
}

/// Log-space continuant state `(log q_n, q_{n-1}/q_n)` of a word.
#[derive(Debug, Clone, Copy)]
pub struct GaussGrowth {
    pub log_q: f64,
    /// `q_{n-1}/q_n`, in `[0, 1]`.
    pub t: f64,
}

impl GaussGrowth {
    pub fn new() -> Self {
        GaussGrowth { log_q: 0.0, t: 0.0 }
    }

    pub fn push(&mut self, a: u32) {
        let r = a as f64 + self.t;
        self.log_q += r.ln();
        self.t = 1.0 / r;
    }

    pub fn of(w: &Word) -> Self {
        let mut g = GaussGrowth::new();
        for &a in w.digits() {
            g.push(a);
        }
        g
    }
}

impl Default for GaussGrowth {
    fn default() -> Self {
        Self::new()
    }
}

/// Floating-point continuant quad `(p_{n-1}, p_n, q_{n-1}, q_n)`; exact for
/// moderate words (all four stay below 2^53) and used by the scan layers
/// where words are short.
#[derive(Debug, Clone, Copy)]
pub struct QuadF64 {
    pub p_prev: f64,
    pub p: f64,
    pub q_prev: f64,
    pub q: f64,
}

impl QuadF64 {
    pub fn new() -> Self {
        QuadF64 { p_prev: 1.0, p: 0.0, q_prev: 0.0, q: 1.0 }
    }

    pub fn push(&mut self, a: u32) {
        let pn = a as f64 * self.p + self.p_prev;
        let qn = a as f64 * self.q + self.q_prev;
        self.p_prev = self.p;
        self.p = pn;
        self.q_prev = self.q;
        self.q = qn;
    }

    pub fn of(w: &Word) -> Self {
        let mut q = QuadF64::new();
        for &a in w.digits() {
            q.push(a);
        }
        q
    }
}

impl Default for QuadF64 {
    fn default() -> Self {
        Self::new()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(d: &[u32]) -> Word {
        Word::new(d.to_vec()).unwrap()
    }

    #[test]
    fn gauss_branch_points() {
        let sys = MarkovSystem::gauss(100);
        assert_eq!(sys.branch_point(&w(&[2]), 0.0).unwrap(), 0.5);
        let v = sys.branch_point(&w(&[2, 3]), 0.0).unwrap();
        assert!((v - 3.0 / 7.0).abs() < 1e-15);
    }

    #[test]
    fn lueroth_branch_points() {
        let sys = MarkovSystem::lueroth(100);
        assert_eq!(sys.branch_point(&w(&[1]), 0.0).unwrap(), 0.5);
    }

    #[test]
    fn gauss_derivatives() {
        let sys = MarkovSystem::gauss(100);
        assert_eq!(sys.branch_derivative(&w(&[2]), 0.0).unwrap(), -0.25);
        // T_{11}(x) = (x+1)/(x+2)
        let v = sys.branch_derivative(&w(&[1, 1]), 0.0).unwrap();
        assert!((v - 0.25).abs() < 1e-15);
    }

    #[test]
    fn lueroth_derivative_constant() {
        let sys = MarkovSystem::lueroth(100);
        for x in [0.0, 0.3, 1.0] {
            let v = sys.branch_derivative(&w(&[1, 1]), x).unwrap();
            assert!((v - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn gauss_distortion_values() {
        let sys = MarkovSystem::gauss(100);
        let v = sys.distortion(&w(&[2]), 0.0).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
        // (x+1)/(x+2): T''/T' = -2/(x+2), at 0 gives -1
        let v = sys.distortion(&w(&[1, 1]), 0.0).unwrap();
        assert!((v + 1.0).abs() < 1e-15);
        assert_eq!(sys.distortion_bound(), 2.0);
    }

    #[test]
    fn lueroth_distortion_zero() {
        let sys = MarkovSystem::lueroth(100);
        assert_eq!(sys.distortion(&w(&[3, 1, 2]), 0.7).unwrap(), 0.0);
    }

    #[test]
    fn cylinders() {
        let sys = MarkovSystem::gauss(100);
        assert_eq!(sys.cylinder(&w(&[1])).unwrap(), (0.5, 1.0));
        let (lo, hi) = sys.cylinder(&w(&[2, 3])).unwrap();
        assert!((lo - 3.0 / 7.0).abs() < 1e-15);
        assert!((hi - 4.0 / 9.0).abs() < 1e-15);
        assert!((hi - lo - 1.0 / 63.0).abs() < 1e-15);
        assert_eq!(sys.cylinder(&Word::empty()).unwrap(), (0.0, 1.0));

        let sys = MarkovSystem::lueroth(100);
        let (lo, hi) = sys.cylinder(&w(&[2])).unwrap();
        assert!((lo - 1.0 / 3.0).abs() < 1e-15 && (hi - 0.5).abs() < 1e-15);
    }

    #[test]
    fn log_derivative_matches_product() {
        let sys = MarkovSystem::gauss(50);
        let word = w(&[3, 1, 4, 1, 5]);
        for x in [0.0, 0.25, 1.0] {
            let d = sys.branch_derivative(&word, x).unwrap();
            let l = sys.log_branch_derivative_abs(&word, x).unwrap();
            assert!((d.abs().ln() - l).abs() < 1e-12);
        }
    }

    #[test]
    fn long_word_log_derivative_finite() {
        let sys = MarkovSystem::gauss(2);
        let word = Word::new(vec![1; 2000]).unwrap();
        let l = sys.log_branch_derivative_abs(&word, 0.5).unwrap();
        assert!(l.is_finite() && l < -1900.0);
        // signed f64 value underflows but keeps its sign convention
        assert_eq!(sys.branch_derivative(&word, 0.5).unwrap(), 0.0);
    }

    #[test]
    fn digit_and_point_validation() {
        let sys = MarkovSystem::gauss(5);
        assert!(sys.branch_point(&w(&[6]), 0.0).is_err());
        assert!(sys.branch_point(&w(&[2]), 1.5).is_err());
    }

    #[test]
    fn quad_f64_matches_exact() {
        let word = w(&[2, 3, 1, 4]);
        let q = QuadF64::of(&word);
        let exact = crate::continuants::continuant_quad(&word);
        assert_eq!(q.q, 43.0);
        assert_eq!(format!("{}", exact.q), "43");
    }
}

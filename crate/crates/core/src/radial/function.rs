use std::fmt;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::weights::Pchip;

use super::grid::RadialGrid;

/// Value and first two radial derivatives at a point.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Jet {
    pub u: f64,
    pub du: f64,
    pub d2u: f64,
}

impl Jet {
    pub fn new(u: f64, du: f64, d2u: f64) -> Self {
        Self { u, du, d2u }
    }

    /// u'' + 3u'/r, the radial Laplacian in R^4.
    pub fn laplacian(&self, r: f64) -> f64 {
        self.d2u + 3.0 * self.du / r
    }

    pub fn scale(&self, c: f64) -> Self {
        Self::new(c * self.u, c * self.du, c * self.d2u)
    }
}

pub type JetFn = Arc<dyn Fn(f64) -> Jet + Send + Sync>;
pub type ScalarFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// One closed-form piece on [lo, hi].
#[derive(Clone)]
pub struct Piece {
    pub lo: f64,
    pub hi: f64,
    jet: JetFn,
    lap: Option<ScalarFn>,
    /// Number of derivatives the jet carries (0, 1 or 2).
    order: u8,
}

impl Piece {
    pub fn new(lo: f64, hi: f64, jet: JetFn) -> Self {
        Self { lo, hi, jet, lap: None, order: 2 }
    }

    /// A piece whose Laplacian is supplied explicitly.
    pub fn with_laplacian(lo: f64, hi: f64, jet: JetFn, lap: ScalarFn) -> Self {
        Self { lo, hi, jet, lap: Some(lap), order: 2 }
    }

    /// A value-only piece.
    pub fn values_only(lo: f64, hi: f64, f: ScalarFn) -> Self {
        let jet: JetFn = Arc::new(move |r| Jet::new(f(r), f64::NAN, f64::NAN));
        Self { lo, hi, jet, lap: None, order: 0 }
    }

    pub fn jet(&self, r: f64) -> Jet {
        (self.jet)(r)
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        match &self.lap {
            Some(l) => l(r),
            None => self.jet(r).laplacian(r),
        }
    }
}

#[derive(Clone)]
pub(crate) struct Sampled {
    grid: RadialGrid,
    u: Vec<f64>,
    interp: Pchip,
    lap: Option<(Vec<f64>, Pchip)>,
}

#[derive(Clone)]
enum Repr {
    Closed(Vec<Piece>),
    Sampled(Sampled),
}

/// A radial profile u(|x|) on R^4.
///
/// Beyond its last piece (or the last grid node) the profile is either zero
/// (finite support) or follows the declared power decay r^{-decay}.
#[derive(Clone)]
pub struct RadialFunction {
    repr: Repr,
    decay: f64,
    support: f64,
    label: String,
}

impl fmt::Debug for RadialFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialFunction")
            .field("label", &self.label)
            .field("decay", &self.decay)
            .field("support", &self.support)
            .finish()
    }
}

/// Minimum declared decay exponent for a profile with unbounded support.
pub const MIN_DECAY: f64 = 2.0;

impl RadialFunction {
    /// Piecewise closed form. Pieces must tile [0, hi_last]; if the last piece
    /// ends at infinity the declared `decay` applies, otherwise u = 0 beyond it.
    pub fn closed(pieces: Vec<Piece>, decay: f64, label: impl Into<String>) -> Result<Self> {
        if pieces.is_empty() {
            return invalid("closed form needs at least one piece");
        }
        if pieces[0].lo != 0.0 {
            return invalid("first piece must start at r = 0");
        }
        for w in pieces.windows(2) {
            if w[0].hi != w[1].lo {
                return invalid(format!("pieces must be contiguous, gap at {} / {}", w[0].hi, w[1].lo));
            }
            let r = w[0].hi;
            let a = w[0].jet(r).u;
            let b = w[1].jet(r).u;
            if (a - b).abs() > 1e-10 * a.abs().max(b.abs()).max(1e-300) && (a - b).abs() > 1e-300 {
                return Err(Error::Construction(format!(
                    "discontinuity at r = {r}: left {a:e}, right {b:e}"
                )));
            }
        }
        let support = pieces[pieces.len() - 1].hi;
        if support.is_infinite() && !(decay >= MIN_DECAY) {
            return invalid(format!("declared decay exponent must be >= {MIN_DECAY}, got {decay}"));
        }
        Ok(Self { repr: Repr::Closed(pieces), decay, support, label: label.into() })
    }

    /// Piecewise profile that may jump between pieces (used for derived
    /// quantities such as Laplacians).
    pub(crate) fn closed_unchecked(pieces: Vec<Piece>, decay: f64, label: impl Into<String>) -> Result<Self> {
        if pieces.is_empty() || pieces[0].lo != 0.0 {
            return invalid("pieces must start at r = 0");
        }
        let support = pieces[pieces.len() - 1].hi;
        Ok(Self { repr: Repr::Closed(pieces), decay, support, label: label.into() })
    }

    /// Single smooth piece on [0, inf).
    pub fn smooth(jet: JetFn, decay: f64, label: impl Into<String>) -> Result<Self> {
        Self::closed(vec![Piece::new(0.0, f64::INFINITY, jet)], decay, label)
    }

    /// Samples on a grid with a declared decay exponent past the last node.
    pub fn sampled(grid: RadialGrid, u: Vec<f64>, decay: f64, label: impl Into<String>) -> Result<Self> {
        if u.len() != grid.len() {
            return invalid("sample count must match grid size");
        }
        if u.iter().any(|v| !v.is_finite()) {
            return invalid("samples must be finite");
        }
        if !(decay >= MIN_DECAY) {
            return invalid(format!("declared decay exponent must be >= {MIN_DECAY}, got {decay}"));
        }
        let t: Vec<f64> = grid.nodes().iter().map(|r| r.ln()).collect();
        let interp = Pchip::new(t.clone(), u.clone())?;
        let lap = if grid.min_nodes_per_decade() >= 5.0 - 1e-9 {
            let l = sampled_laplacian(&grid, &u)?;
            let p = Pchip::new(t, l.clone())?;
            Some((l, p))
        } else {
            None
        };
        Ok(Self {
            repr: Repr::Sampled(Sampled { grid, u, interp, lap }),
            decay,
            support: f64::INFINITY,
            label: label.into(),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn decay(&self) -> f64 {
        self.decay
    }

    /// Radius past which u vanishes identically (infinite if unbounded).
    pub fn support(&self) -> f64 {
        self.support
    }

    pub fn is_closed_form(&self) -> bool {
        matches!(self.repr, Repr::Closed(_))
    }

    pub fn pieces(&self) -> Option<&[Piece]> {
        match &self.repr {
            Repr::Closed(p) => Some(p),
            Repr::Sampled(_) => None,
        }
    }

    pub fn grid(&self) -> Option<&RadialGrid> {
        match &self.repr {
            Repr::Sampled(s) => Some(&s.grid),
            Repr::Closed(_) => None,
        }
    }

    pub fn samples(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::Sampled(s) => Some(&s.u),
            Repr::Closed(_) => None,
        }
    }

    /// Whether a Laplacian is available everywhere.
    pub fn has_laplacian(&self) -> bool {
        match &self.repr {
            Repr::Closed(p) => p.iter().all(|x| x.lap.is_some() || x.order >= 2),
            Repr::Sampled(s) => s.lap.is_some(),
        }
    }

    /// Interior radii where the representation changes (piece ends, grid nodes).
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Closed(p) => p.iter().map(|x| x.hi).filter(|h| h.is_finite()).collect(),
            Repr::Sampled(s) => s.grid.nodes().to_vec(),
        }
    }

    fn piece_at(pieces: &[Piece], r: f64) -> Option<&Piece> {
        let i = pieces.partition_point(|p| p.hi < r);
        pieces.get(i)
    }

    fn sampled_tail(&self, s: &Sampled, v_end: f64, r: f64) -> f64 {
        v_end * (r / s.grid.r_max()).powf(-self.decay)
    }

    pub fn value(&self, r: f64) -> f64 {
        match &self.repr {
            Repr::Closed(p) => match Self::piece_at(p, r) {
                Some(piece) => piece.jet(r).u,
                None => 0.0,
            },
            Repr::Sampled(s) => {
                if r > s.grid.r_max() {
                    self.sampled_tail(s, s.u[s.u.len() - 1], r)
                } else if r <= s.grid.r_min() {
                    s.u[0]
                } else {
                    s.interp.eval(r.ln())
                }
            }
        }
    }

    /// Value and derivatives; derivatives are NaN where unavailable.
    pub fn jet(&self, r: f64) -> Jet {
        match &self.repr {
            Repr::Closed(p) => match Self::piece_at(p, r) {
                Some(piece) => piece.jet(r),
                None => Jet::default(),
            },
            Repr::Sampled(_) => Jet::new(self.value(r), f64::NAN, f64::NAN),
        }
    }

    /// Right-sided jet at r: at a piece boundary the piece starting at r is used.
    pub fn jet_right(&self, r: f64) -> Jet {
        match &self.repr {
            Repr::Closed(p) => {
                let i = p.partition_point(|x| x.hi <= r);
                p.get(i).map(|x| x.jet(r)).unwrap_or_default()
            }
            Repr::Sampled(_) => self.jet(r),
        }
    }

    pub fn laplacian(&self, r: f64) -> f64 {
        match &self.repr {
            Repr::Closed(p) => match Self::piece_at(p, r) {
                Some(piece) => piece.laplacian(r),
                None => 0.0,
            },
            Repr::Sampled(s) => match &s.lap {
                Some((l, interp)) => {
                    if r > s.grid.r_max() {
                        let d = self.decay;
                        self.sampled_tail(s, s.u[s.u.len() - 1], r) * d * (d - 2.0) / (r * r)
                    } else if r <= s.grid.r_min() {
                        l[0]
                    } else {
                        interp.eval(r.ln())
                    }
                }
                None => f64::NAN,
            },
        }
    }

    /// c * u.
    pub fn scaled(&self, c: f64) -> RadialFunction {
        let repr = match &self.repr {
            Repr::Closed(p) => Repr::Closed(
                p.iter()
                    .map(|piece| {
                        let j = piece.jet.clone();
                        let jet: JetFn = Arc::new(move |r| j(r).scale(c));
                        let lap = piece.lap.clone().map(|l| -> ScalarFn { Arc::new(move |r| c * l(r)) });
                        Piece { lo: piece.lo, hi: piece.hi, jet, lap, order: piece.order }
                    })
                    .collect(),
            ),
            Repr::Sampled(s) => {
                let u: Vec<f64> = s.u.iter().map(|v| c * v).collect();
                let t: Vec<f64> = s.grid.nodes().iter().map(|r| r.ln()).collect();
                let interp = Pchip::new(t.clone(), u.clone()).expect("grid already validated");
                let lap = s.lap.as_ref().map(|(l, _)| {
                    let l: Vec<f64> = l.iter().map(|v| c * v).collect();
                    let p = Pchip::new(t.clone(), l.clone()).expect("grid already validated");
                    (l, p)
                });
                Repr::Sampled(Sampled { grid: s.grid.clone(), u, interp, lap })
            }
        };
        RadialFunction { repr, decay: self.decay, support: self.support, label: self.label.clone() }
    }

    /// Samples this function on a grid.
    pub fn sample_on(&self, grid: &RadialGrid) -> Result<RadialFunction> {
        let u = grid.nodes().iter().map(|&r| self.value(r)).collect();
        let decay = if self.support.is_finite() || self.decay.is_infinite() { 64.0 } else { self.decay };
        RadialFunction::sampled(grid.clone(), u, decay, self.label.clone())
    }

    /// Writes (r, u, laplacian_u) CSV plus a JSON sidecar with grid metadata.
    pub fn write_csv(&self, csv_path: &Path, sidecar: &Path) -> Result<()> {
        let Repr::Sampled(s) = &self.repr else {
            return invalid("only sampled functions serialize to CSV");
        };
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["r", "u", "laplacian_u"])?;
        for (i, &r) in s.grid.nodes().iter().enumerate() {
            let l = s.lap.as_ref().map(|(l, _)| l[i]).unwrap_or(f64::NAN);
            w.write_record([fmt_num(r), fmt_num(s.u[i]), fmt_num(l)])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        crate::io::write_atomic(csv_path, &bytes)?;
        let meta = SampledMeta {
            label: self.label.clone(),
            decay: self.decay,
            nodes: s.grid.len(),
            r_min: s.grid.r_min(),
            r_max: s.grid.r_max(),
            min_nodes_per_decade: s.grid.min_nodes_per_decade(),
        };
        crate::io::write_atomic(sidecar, serde_json::to_string_pretty(&meta)?.as_bytes())
    }

    /// Reads a function written by [`RadialFunction::write_csv`].
    pub fn read_csv(csv_path: &Path, sidecar: &Path) -> Result<RadialFunction> {
        let meta: SampledMeta = serde_json::from_slice(&std::fs::read(sidecar)?)?;
        let mut rd = csv::Reader::from_path(csv_path)?;
        let mut r = Vec::new();
        let mut u = Vec::new();
        for rec in rd.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::InvalidParameter(format!("bad CSV field {i}")))
            };
            r.push(parse(0)?);
            u.push(parse(1)?);
        }
        RadialFunction::sampled(RadialGrid::from_nodes(r)?, u, meta.decay, meta.label)
    }
}

fn fmt_num(v: f64) -> String {
    format!("{v:e}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledMeta {
    pub label: String,
    pub decay: f64,
    pub nodes: usize,
    pub r_min: f64,
    pub r_max: f64,
    pub min_nodes_per_decade: f64,
}

/// Finite-difference weights for derivatives 0..=m at x0 (Fornberg).
pub fn fornberg_weights(x0: f64, xs: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = xs.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = xs[i] - x0;
        for j in 0..i {
            let c3 = xs[i] - xs[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Laplacian at each node from five-point stencils in t = ln r; stencils
/// stay on one side of r = 1 (the node r = 1 uses the right side).
pub(crate) fn sampled_laplacian(grid: &RadialGrid, u: &[f64]) -> Result<Vec<f64>> {
    if grid.min_nodes_per_decade() < 5.0 - 1e-9 {
        return Err(Error::Discretization(format!(
            "only {:.2} nodes per decade; at least 5 required",
            grid.min_nodes_per_decade()
        )));
    }
    let r = grid.nodes();
    let n = r.len();
    let t: Vec<f64> = r.iter().map(|x| x.ln()).collect();
    let k = grid.kink_index();
    let mut out = vec![0.0; n];
    for i in 0..n {
        let (lo, hi) = if i < k { (0, k) } else { (k, n - 1) };
        if hi - lo + 1 < 5 {
            return Err(Error::Discretization("fewer than 5 nodes on one side of r = 1".into()));
        }
        let start = i.saturating_sub(2).clamp(lo, hi - 4);
        let xs = &t[start..start + 5];
        let w = fornberg_weights(t[i], xs, 2);
        let (mut ut, mut utt) = (0.0, 0.0);
        for j in 0..5 {
            ut += w[1][j] * u[start + j];
            utt += w[2][j] * u[start + j];
        }
        out[i] = (utt + 2.0 * ut) / (r[i] * r[i]);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn fornberg_central_second_derivative() {
        let w = fornberg_weights(0.0, &[-2.0, -1.0, 0.0, 1.0, 2.0], 2);
        let expect = [-1.0 / 12.0, 4.0 / 3.0, -5.0 / 2.0, 4.0 / 3.0, -1.0 / 12.0];
        for j in 0..5 {
            assert_relative_eq!(w[2][j], expect[j], epsilon = 1e-13);
        }
    }

    #[test]
    fn discontinuity_is_refused() {
        let a = Piece::new(0.0, 1.0, Arc::new(|_| Jet::new(1.0, 0.0, 0.0)));
        let b = Piece::new(1.0, f64::INFINITY, Arc::new(|_| Jet::new(2.0, 0.0, 0.0)));
        assert!(matches!(RadialFunction::closed(vec![a, b], 4.0, "x"), Err(Error::Construction(_))));
    }

    #[test]
    fn sparse_grid_has_no_laplacian() {
        let g = RadialGrid::geometric(1e-3, 1e3, 4).unwrap();
        let u = g.nodes().iter().map(|r| (-r * r).exp()).collect();
        let f = RadialFunction::sampled(g.clone(), u, 4.0, "g").unwrap();
        assert!(!f.has_laplacian());
        assert!(sampled_laplacian(&g, &vec![0.0; g.len()]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let g = RadialGrid::geometric(1e-3, 1e3, 10).unwrap();
        let u: Vec<f64> = g.nodes().iter().map(|r| 1.0 / (1.0 + r * r)).collect();
        let f = RadialFunction::sampled(g, u.clone(), 2.0, "rat").unwrap();
        let (c, s) = (dir.path().join("u.csv"), dir.path().join("u.json"));
        f.write_csv(&c, &s).unwrap();
        let back = RadialFunction::read_csv(&c, &s).unwrap();
        assert_eq!(back.samples().unwrap().len(), u.len());
        assert_relative_eq!(back.value(0.5), f.value(0.5), max_relative = 1e-12);
    }
}

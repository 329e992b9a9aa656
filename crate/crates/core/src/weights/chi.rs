use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};

/// Tail function of the weight on [1, inf).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ChiSpec {
    /// chi(y) = y^a
    Power { a: f64 },
    /// Positive samples on [1, R]; beyond R the tail is c * y^tail_exponent.
    #[serde(alias = "user")]
    Table {
        r: Vec<f64>,
        chi: Vec<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tail_exponent: Option<f64>,
    },
}

/// chi(y) = coef * y^exponent for y >= start.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TailLaw {
    pub start: f64,
    pub coef: f64,
    pub exponent: f64,
}

impl TailLaw {
    pub fn eval(&self, y: f64) -> f64 {
        self.coef * y.powf(self.exponent)
    }
}

/// Monotone piecewise-cubic Hermite interpolant (Fritsch-Carlson slopes).
#[derive(Clone, Debug, PartialEq)]
pub struct Pchip {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
}

impl Pchip {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return invalid("interpolation needs at least two samples of equal length");
        }
        if x.windows(2).any(|w| !(w[1] > w[0])) {
            return invalid("interpolation nodes must be strictly increasing");
        }
        let h: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
        let del: Vec<f64> = (0..n - 1).map(|k| (y[k + 1] - y[k]) / h[k]).collect();
        let mut d = vec![0.0; n];
        if n == 2 {
            d[0] = del[0];
            d[1] = del[0];
        } else {
            for k in 1..n - 1 {
                if del[k - 1] * del[k] > 0.0 {
                    let w1 = 2.0 * h[k] + h[k - 1];
                    let w2 = h[k] + 2.0 * h[k - 1];
                    d[k] = (w1 + w2) / (w1 / del[k - 1] + w2 / del[k]);
                }
            }
            d[0] = end_slope(h[0], h[1], del[0], del[1]);
            d[n - 1] = end_slope(h[n - 2], h[n - 3], del[n - 2], del[n - 3]);
        }
        Ok(Self { x, y, d })
    }

    pub fn nodes(&self) -> &[f64] {
        &self.x
    }

    pub fn values(&self) -> &[f64] {
        &self.y
    }

    /// Evaluates inside [x_0, x_{n-1}]; clamps outside.
    pub fn eval(&self, t: f64) -> f64 {
        let n = self.x.len();
        if t <= self.x[0] {
            return self.y[0];
        }
        if t >= self.x[n - 1] {
            return self.y[n - 1];
        }
        let k = self.x.partition_point(|&v| v <= t) - 1;
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (s2, s3) = (s * s, s * s * s);
        self.y[k] * (2.0 * s3 - 3.0 * s2 + 1.0)
            + h * self.d[k] * (s3 - 2.0 * s2 + s)
            + self.y[k + 1] * (-2.0 * s3 + 3.0 * s2)
            + h * self.d[k + 1] * (s3 - s2)
    }
}

fn end_slope(h0: f64, h1: f64, m0: f64, m1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * m0 - h0 * m1) / (h0 + h1);
    if d.signum() != m0.signum() {
        0.0
    } else if m0.signum() != m1.signum() && d.abs() > 3.0 * m0.abs() {
        3.0 * m0
    } else {
        d
    }
}

/// Validated, normalized form of a [`ChiSpec`].
#[derive(Clone, Debug, PartialEq)]
pub(crate) enum Chi {
    Power(f64),
    Table { interp: Pchip, tail: Option<f64> },
}

impl Chi {
    pub(crate) fn compile(spec: &ChiSpec) -> Result<Self> {
        match spec {
            ChiSpec::Power { a } => {
                if !a.is_finite() {
                    return invalid(format!("power exponent must be finite, got {a}"));
                }
                if *a < 0.0 {
                    return invalid(format!("power exponent {a} < 0 gives inf chi = 0"));
                }
                Ok(Chi::Power(*a))
            }
            ChiSpec::Table { r, chi, tail_exponent } => {
                if r.len() < 2 || r.len() != chi.len() {
                    return invalid("tabulated chi needs matching r and chi arrays of length >= 2");
                }
                if (r[0] - 1.0).abs() > 1e-12 {
                    return invalid(format!("tabulated chi must start at r = 1, got {}", r[0]));
                }
                if chi.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
                    return invalid("tabulated chi samples must be finite and positive");
                }
                if let Some(t) = tail_exponent {
                    if !t.is_finite() {
                        return invalid("tail exponent must be finite");
                    }
                }
                let scale = chi[0];
                let mut x = r.clone();
                x[0] = 1.0;
                let y = chi.iter().map(|v| v / scale).collect();
                Ok(Chi::Table {
                    interp: Pchip::new(x, y)?,
                    tail: *tail_exponent,
                })
            }
        }
    }

    /// chi(y) for y >= 1. Past a table without declared tail the last value is held.
    pub(crate) fn eval(&self, y: f64) -> f64 {
        match self {
            Chi::Power(a) => y.powf(*a),
            Chi::Table { interp, tail } => {
                let xs = interp.nodes();
                let last = xs[xs.len() - 1];
                if y <= last {
                    interp.eval(y)
                } else {
                    let v = interp.values()[xs.len() - 1];
                    v * (y / last).powf(tail.unwrap_or(0.0))
                }
            }
        }
    }

    pub(crate) fn tail(&self) -> Option<TailLaw> {
        match self {
            Chi::Power(a) => Some(TailLaw { start: 1.0, coef: 1.0, exponent: *a }),
            Chi::Table { interp, tail } => tail.map(|t| {
                let xs = interp.nodes();
                let last = xs[xs.len() - 1];
                let v = interp.values()[xs.len() - 1];
                TailLaw { start: last, coef: v / last.powf(t), exponent: t }
            }),
        }
    }

    pub(crate) fn breakpoints(&self) -> Vec<f64> {
        match self {
            Chi::Power(_) => vec![1.0],
            Chi::Table { interp, .. } => interp.nodes().to_vec(),
        }
    }

    pub(crate) fn table_min(&self) -> Option<f64> {
        match self {
            Chi::Power(_) => None,
            Chi::Table { interp, .. } => interp.values().iter().copied().reduce(f64::min),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn pchip_reproduces_nodes_and_lines() {
        let p = Pchip::new(vec![1.0, 2.0, 4.0], vec![1.0, 3.0, 7.0]).unwrap();
        assert_relative_eq!(p.eval(2.0), 3.0);
        assert_relative_eq!(p.eval(3.0), 5.0, max_relative = 1e-14);
    }

    #[test]
    fn pchip_is_monotone_on_monotone_data() {
        let p = Pchip::new(vec![1.0, 2.0, 3.0, 10.0], vec![1.0, 1.1, 5.0, 5.2]).unwrap();
        let mut prev = p.eval(1.0);
        for i in 1..=900 {
            let v = p.eval(1.0 + i as f64 * 0.01);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn table_is_rescaled_to_unit_at_one() {
        let c = Chi::compile(&ChiSpec::Table {
            r: vec![1.0, 2.0],
            chi: vec![2.0, 16.0],
            tail_exponent: Some(3.0),
        })
        .unwrap();
        assert_relative_eq!(c.eval(1.0), 1.0);
        assert_relative_eq!(c.eval(4.0), 8.0 * 8.0, max_relative = 1e-14);
    }

    #[test]
    fn json_round_trip() {
        let s = r#"{"kind":"table","r":[1,2],"chi":[1,8],"tail_exponent":3}"#;
        let c: ChiSpec = serde_json::from_str(s).unwrap();
        let back = serde_json::to_string(&c).unwrap();
        assert_eq!(serde_json::from_str::<ChiSpec>(&back).unwrap(), c);
        let p: ChiSpec = serde_json::from_str(r#"{"kind":"power","a":3}"#).unwrap();
        assert_eq!(p, ChiSpec::Power { a: 3.0 });
    }
}

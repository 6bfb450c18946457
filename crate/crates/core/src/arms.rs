//! Adaptive Rejection Metropolis Sampling for univariate targets on a
//! bounded open interval.
//!
//! The envelope is the secant-based pseudo-hull: between abscissae `x_i`
//! and `x_{i+1}` it is `max(L_{i,i+1}, min(L_{i-1,i}, L_{i+1,i+2}))`, and in
//! the two tails it is the extension of the outermost secant. For a
//! log-concave target this dominates the density and the final Metropolis
//! step always accepts; otherwise the Metropolis step corrects for the
//! regions where the envelope falls below the target.

use rand::Rng;

use crate::error::{Error, Result};

/// Upper bound on envelope rejections per draw before falling back to a
/// random-walk Metropolis step.
pub const MAX_REJECTIONS: usize = 500;

/// Relative positions of the initial abscissae inside the domain.
pub const INITIAL_QUANTILES: [f64; 5] = [0.1, 0.3, 0.5, 0.7, 0.9];

/// An open interval `(lower, upper)` with finite endpoints.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Domain {
    lower: f64,
    upper: f64,
}

impl Domain {
    pub fn new(lower: f64, upper: f64) -> Result<Self> {
        if !(lower.is_finite() && upper.is_finite() && lower < upper) {
            return Err(Error::InvalidParameter(format!(
                "invalid ARMS domain ({lower}, {upper})"
            )));
        }
        Ok(Self { lower, upper })
    }

    pub fn unit() -> Self {
        Self {
            lower: 0.0,
            upper: 1.0,
        }
    }

    /// Working interval for a positive rate parameter: `(0, max(50, 10·current))`.
    pub fn positive_from(current: f64) -> Self {
        let upper = if current.is_finite() {
            (10.0 * current).max(50.0)
        } else {
            50.0
        };
        Self { lower: 0.0, upper }
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, x: f64) -> bool {
        x > self.lower && x < self.upper
    }

    /// The default starting abscissae at fixed relative positions.
    pub fn default_abscissae(&self) -> Vec<f64> {
        INITIAL_QUANTILES
            .iter()
            .map(|q| self.lower + q * self.width())
            .collect()
    }
}

/// A straight line in log-density space.
#[derive(Debug, Clone, Copy)]
struct Line {
    x0: f64,
    y0: f64,
    slope: f64,
}

impl Line {
    fn through(x1: f64, y1: f64, x2: f64, y2: f64) -> Self {
        Self {
            x0: x1,
            y0: y1,
            slope: (y2 - y1) / (x2 - x1),
        }
    }

    fn at(&self, x: f64) -> f64 {
        self.y0 + self.slope * (x - self.x0)
    }

    fn crossing(&self, other: &Line) -> Option<f64> {
        let ds = self.slope - other.slope;
        if ds == 0.0 || !ds.is_finite() {
            return None;
        }
        let x = (other.at(0.0) - self.at(0.0)) / ds;
        x.is_finite().then_some(x)
    }
}

/// A piece of the envelope: a single line on `[left, right]`.
#[derive(Debug, Clone, Copy)]
struct Segment {
    left: f64,
    right: f64,
    /// Envelope value at `left`.
    y_left: f64,
    slope: f64,
    /// `ln ∫ exp(envelope)` over the segment.
    log_mass: f64,
}

impl Segment {
    fn new(left: f64, right: f64, line: &Line) -> Self {
        let y_left = line.at(left);
        let slope = line.slope;
        let w = right - left;
        let sw = slope * w;
        let log_mass = if w <= 0.0 {
            f64::NEG_INFINITY
        } else if sw.abs() < 1e-12 {
            y_left + w.ln()
        } else if slope > 0.0 {
            // ∫ e^{y_left + s u} du = e^{y_left} (e^{sw} - 1) / s
            y_left + sw + (-(-sw).exp_m1()).ln() - slope.ln()
        } else {
            y_left + (-sw.exp_m1()).ln() - (-slope).ln()
        };
        Self {
            left,
            right,
            y_left,
            slope,
            log_mass,
        }
    }

    fn value(&self, x: f64) -> f64 {
        self.y_left + self.slope * (x - self.left)
    }

    /// Inverse-cdf draw from the density proportional to `exp(line)` on the segment.
    fn sample(&self, u: f64) -> f64 {
        let w = self.right - self.left;
        let sw = self.slope * w;
        let x = if sw.abs() < 1e-12 {
            self.left + u * w
        } else if self.slope > 0.0 {
            self.right + (u + (1.0 - u) * (-sw).exp()).ln() / self.slope
        } else {
            self.left + (1.0 - u + u * sw.exp()).ln() / self.slope
        };
        x.clamp(self.left, self.right)
    }
}

/// The piecewise-exponential envelope built from the current abscissae.
#[derive(Debug, Clone)]
pub struct ArmsEnvelope {
    domain: Domain,
    abscissae: Vec<f64>,
    log_values: Vec<f64>,
    segments: Vec<Segment>,
    cumulative: Vec<f64>,
}

impl ArmsEnvelope {
    /// Builds an envelope from points with finite log-density. Needs at least
    /// two distinct points strictly inside the domain.
    pub fn new(domain: Domain, points: &[(f64, f64)]) -> Result<Self> {
        let mut pts: Vec<(f64, f64)> = points
            .iter()
            .copied()
            .filter(|&(x, y)| domain.contains(x) && y.is_finite())
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        pts.dedup_by(|a, b| a.0 == b.0);
        if pts.len() < 2 {
            return Err(Error::ArmsInit(format!(
                "need two interior points with finite log-density, have {}",
                pts.len()
            )));
        }
        let mut env = Self {
            domain,
            abscissae: pts.iter().map(|p| p.0).collect(),
            log_values: pts.iter().map(|p| p.1).collect(),
            segments: Vec::new(),
            cumulative: Vec::new(),
        };
        env.rebuild();
        Ok(env)
    }

    pub fn abscissae(&self) -> &[f64] {
        &self.abscissae
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn domain(&self) -> Domain {
        self.domain
    }

    /// Adds a point and rebuilds the hull. Non-finite values and duplicates
    /// are ignored.
    pub fn insert(&mut self, x: f64, log_value: f64) {
        if !log_value.is_finite() || !self.domain.contains(x) {
            return;
        }
        match self.abscissae.binary_search_by(|v| v.total_cmp(&x)) {
            Ok(_) => {}
            Err(pos) => {
                self.abscissae.insert(pos, x);
                self.log_values.insert(pos, log_value);
                self.rebuild();
            }
        }
    }

    fn secant(&self, i: usize) -> Line {
        Line::through(
            self.abscissae[i],
            self.log_values[i],
            self.abscissae[i + 1],
            self.log_values[i + 1],
        )
    }

    fn rebuild(&mut self) {
        let k = self.abscissae.len();
        let mut segments = Vec::with_capacity(4 * k);
        let first = self.secant(0);
        let last = self.secant(k - 2);
        segments.push(Segment::new(self.domain.lower, self.abscissae[0], &first));
        for i in 0..k - 1 {
            let (l, r) = (self.abscissae[i], self.abscissae[i + 1]);
            let own = self.secant(i);
            let before = (i > 0).then(|| self.secant(i - 1));
            let after = (i + 2 < k).then(|| self.secant(i + 1));
            let hull = |x: f64| -> f64 {
                let outer = match (before, after) {
                    (Some(b), Some(a)) => b.at(x).min(a.at(x)),
                    (Some(b), None) => b.at(x),
                    (None, Some(a)) => a.at(x),
                    (None, None) => f64::NEG_INFINITY,
                };
                own.at(x).max(outer)
            };
            let lines: Vec<Line> = [Some(own), before, after].into_iter().flatten().collect();
            let mut cuts = vec![l, r];
            for (a, line_a) in lines.iter().enumerate() {
                for line_b in &lines[a + 1..] {
                    if let Some(x) = line_a.crossing(line_b) {
                        if x > l && x < r {
                            cuts.push(x);
                        }
                    }
                }
            }
            cuts.sort_by(f64::total_cmp);
            cuts.dedup();
            for w in cuts.windows(2) {
                let (cl, cr) = (w[0], w[1]);
                if cr <= cl {
                    continue;
                }
                let mid = 0.5 * (cl + cr);
                let target = hull(mid);
                let active = lines
                    .iter()
                    .min_by(|p, q| {
                        (p.at(mid) - target)
                            .abs()
                            .total_cmp(&(q.at(mid) - target).abs())
                    })
                    .copied()
                    .unwrap_or(own);
                segments.push(Segment::new(cl, cr, &active));
            }
        }
        segments.push(Segment::new(
            self.abscissae[k - 1],
            self.domain.upper,
            &last,
        ));
        segments.retain(|s| s.right > s.left);

        let max = segments
            .iter()
            .map(|s| s.log_mass)
            .fold(f64::NEG_INFINITY, f64::max);
        let mut acc = 0.0;
        let cumulative = segments
            .iter()
            .map(|s| {
                acc += (s.log_mass - max).exp();
                acc
            })
            .collect();
        self.segments = segments;
        self.cumulative = cumulative;
    }

    /// Envelope log-value at `x`.
    pub fn log_envelope(&self, x: f64) -> f64 {
        let idx = self
            .segments
            .partition_point(|s| s.right < x)
            .min(self.segments.len() - 1);
        self.segments[idx].value(x)
    }

    /// Draws from the normalized envelope density.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let total = *self.cumulative.last().expect("envelope has segments");
        let target = rng.random::<f64>() * total;
        let idx = self
            .cumulative
            .partition_point(|&c| c <= target)
            .min(self.segments.len() - 1);
        let x = self.segments[idx].sample(rng.random());
        // Keep strictly inside the open domain.
        if self.domain.contains(x) {
            x
        } else {
            let eps = self.domain.width() * 1e-12;
            x.clamp(self.domain.lower + eps, self.domain.upper - eps)
        }
    }
}

/// Outcome of one ARMS transition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ArmsDraw {
    pub value: f64,
    /// Whether the Metropolis step moved away from the current value.
    pub accepted: bool,
    /// Envelope rejections before a candidate was accepted.
    pub rejections: usize,
    /// Whether the rejection budget ran out and a random-walk step was used.
    pub fallback: bool,
}

/// One ARMS transition from `current` targeting `exp(log_kernel)` on `domain`.
///
/// The envelope is rebuilt from `init` on every call and refined with the
/// rejected candidates; nothing persists between calls. Non-finite kernel
/// values are treated as `-inf`.
pub fn arms_draw<F, R>(
    mut log_kernel: F,
    domain: Domain,
    init: &[f64],
    current: f64,
    rng: &mut R,
) -> Result<ArmsDraw>
where
    F: FnMut(f64) -> f64,
    R: Rng + ?Sized,
{
    let mut eval = |x: f64| -> f64 {
        let v = log_kernel(x);
        if v.is_nan() || v == f64::INFINITY {
            f64::NEG_INFINITY
        } else {
            v
        }
    };
    let points: Vec<(f64, f64)> = init.iter().map(|&x| (x, eval(x))).collect();
    if points.iter().all(|p| p.1 == f64::NEG_INFINITY) {
        return Err(Error::ArmsInit(
            "log-density is -inf at every initial abscissa".into(),
        ));
    }
    let mut envelope = match ArmsEnvelope::new(domain, &points) {
        Ok(env) => env,
        Err(_) => {
            // Only one usable point: refine on a denser grid before giving up.
            let dense: Vec<(f64, f64)> = (1..40)
                .map(|i| domain.lower + domain.width() * i as f64 / 40.0)
                .map(|x| (x, eval(x)))
                .chain(points.iter().copied())
                .collect();
            ArmsEnvelope::new(domain, &dense)?
        }
    };
    let log_current = if domain.contains(current) {
        eval(current)
    } else {
        f64::NEG_INFINITY
    };

    let mut rejections = 0;
    while rejections < MAX_REJECTIONS {
        let candidate = envelope.sample(rng);
        let log_target = eval(candidate);
        let log_env = envelope.log_envelope(candidate);
        let ln_u = rng.random::<f64>().ln();
        if log_target == f64::NEG_INFINITY || ln_u > log_target - log_env {
            envelope.insert(candidate, log_target);
            rejections += 1;
            continue;
        }
        // Metropolis correction for the parts of the domain where the
        // envelope underestimates the target.
        if log_current == f64::NEG_INFINITY {
            return Ok(ArmsDraw {
                value: candidate,
                accepted: true,
                rejections,
                fallback: false,
            });
        }
        let env_current = envelope.log_envelope(current);
        let log_ratio =
            log_target + log_current.min(env_current) - log_current - log_target.min(log_env);
        let accepted = log_ratio >= 0.0 || rng.random::<f64>().ln() < log_ratio;
        let value = if accepted { candidate } else { current };
        return Ok(ArmsDraw {
            value,
            accepted,
            rejections,
            fallback: false,
        });
    }

    let scale = domain.width() / 20.0;
    let proposal = current + scale * (2.0 * rng.random::<f64>() - 1.0);
    let accepted = domain.contains(proposal) && {
        let log_prop = eval(proposal);
        log_prop > f64::NEG_INFINITY
            && (log_current == f64::NEG_INFINITY
                || log_prop >= log_current
                || rng.random::<f64>().ln() < log_prop - log_current)
    };
    Ok(ArmsDraw {
        value: if accepted { proposal } else { current },
        accepted,
        rejections,
        fallback: true,
    })
}

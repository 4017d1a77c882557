//! Large-`n` theory of the two-star model: the phase diagram in `theta`,
//! the magnetization fixed point `m = tanh(2 theta2 m + theta1)`, and the
//! closed-form limit constants derived from it.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::fmt::json_real;
use crate::model::{Beta, Theta};

/// Which region of the parameter plane a `Theta` belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum DomainClass {
    /// `theta1 = 0`, `theta2 < 1/2`: unique root `m = 0`.
    Theta11,
    /// `theta1 > 0`: unique positive root.
    Theta12,
    /// `theta1 < 0`: unique negative root.
    Theta13,
    /// `theta1 = 0`, `theta2 > 1/2`: two roots `±m`.
    Theta2,
    /// The critical point `(0, 1/2)`.
    Theta3,
}

impl DomainClass {
    pub fn name(self) -> &'static str {
        match self {
            DomainClass::Theta11 => "Theta11",
            DomainClass::Theta12 => "Theta12",
            DomainClass::Theta13 => "Theta13",
            DomainClass::Theta2 => "Theta2",
            DomainClass::Theta3 => "Theta3",
        }
    }

    /// True on the uniqueness region (`Theta11`, `Theta12`, `Theta13`).
    pub fn is_unique(self) -> bool {
        matches!(self, DomainClass::Theta11 | DomainClass::Theta12 | DomainClass::Theta13)
    }
}

/// Classifies `t`. `theta1` is compared with zero exactly: the symmetric
/// two-phase region only exists on the line `theta1 == 0.0`.
pub fn classify(t: Theta) -> DomainClass {
    let (t1, t2) = (t.theta1(), t.theta2());
    if t1 > 0.0 {
        DomainClass::Theta12
    } else if t1 < 0.0 {
        DomainClass::Theta13
    } else if t2 < 0.5 {
        DomainClass::Theta11
    } else if t2 > 0.5 {
        DomainClass::Theta2
    } else {
        DomainClass::Theta3
    }
}

/// Below this, a root found in `Theta2` is indistinguishable from zero.
pub const NEAR_CRITICAL_ROOT: f64 = 1e-8;

/// Solution of the fixed-point equation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Magnetization {
    pub m: f64,
    /// Set in `Theta2` when the positive root is below [`NEAR_CRITICAL_ROOT`].
    pub near_critical: bool,
}

/// Positive root of `t - tanh(a t + h)` for `h >= 0`, bracketed on
/// `[lo, 1 - 1e-15]`, bisected to width 1e-13 and polished by Newton.
fn positive_root(a: f64, h: f64, lo: f64) -> f64 {
    let g = |t: f64| t - (a * t + h).tanh();
    let dg = |t: f64| {
        let th = (a * t + h).tanh();
        1.0 - a * (1.0 - th * th)
    };
    let mut lo = lo;
    let mut hi = 1.0 - 1e-15;
    if g(hi) < 0.0 {
        // tanh has saturated in double precision
        hi = 1.0;
        if g(hi) <= 0.0 {
            return 1.0;
        }
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // with a field the iterate may touch zero on the way to a subnormal root;
    // without one, zero is the other fixed point and must be avoided
    let floor = if h > 0.0 { 0.0 } else { f64::MIN_POSITIVE };
    let mut t = 0.5 * (lo + hi);
    for _ in 0..3 {
        let slope = dg(t);
        if slope <= 0.0 {
            break;
        }
        let next = t - g(t) / slope;
        if !(next >= floor && next <= 1.0) || g(next).abs() > g(t).abs() {
            break;
        }
        t = next;
    }
    t
}

pub fn solve_magnetization(t: Theta) -> Magnetization {
    let a = 2.0 * t.theta2();
    match classify(t) {
        DomainClass::Theta11 | DomainClass::Theta3 => Magnetization { m: 0.0, near_critical: false },
        DomainClass::Theta12 => Magnetization { m: positive_root(a, t.theta1(), 0.0), near_critical: false },
        // odd symmetry of tanh: the negative root for theta1 is minus the
        // positive root for -theta1
        DomainClass::Theta13 => Magnetization { m: -positive_root(a, -t.theta1(), 0.0), near_critical: false },
        DomainClass::Theta2 => {
            let m = positive_root(a, 0.0, 1e-15);
            Magnetization { m, near_critical: m < NEAR_CRITICAL_ROOT }
        }
    }
}

/// The relevant root `m(theta)` of `t = tanh(2 theta2 t + theta1)`.
pub fn solve_m(t: Theta) -> f64 {
    solve_magnetization(t).m
}

/// Second derivative `q''(2m) = theta2/2 - theta2^2 sech^2(2 theta2 m + theta1)`
/// of `q(t) = theta2 t^2 / 4 - log cosh(theta2 t + theta1)` at the fixed point.
/// Positive on the uniqueness and two-phase regions, zero at the critical point.
pub fn check_stability(t: Theta) -> f64 {
    let m = solve_m(t);
    let th = (2.0 * t.theta2() * m + t.theta1()).tanh();
    t.theta2() / 2.0 - t.theta2() * t.theta2() * (1.0 - th * th)
}

/// Limit constants at a non-critical `theta`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AsymptoticConstants {
    pub theta: Theta,
    pub domain: DomainClass,
    pub m: f64,
    pub near_critical: bool,
    pub mu: f64,
    pub tau1: f64,
    pub tau2: f64,
    pub eta1: f64,
    pub eta2: f64,
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    /// Limiting degree fraction `(1 + m) / 2`.
    pub p_plus: f64,
    /// Limiting degree fraction `(1 - m) / 2`.
    pub p_minus: f64,
    /// `q''(2m)`, see [`check_stability`].
    pub stability: f64,
}

pub fn constants(t: Theta) -> Result<AsymptoticConstants> {
    let domain = classify(t);
    if domain == DomainClass::Theta3 {
        return Err(Error::CriticalPoint { theta1: t.theta1(), theta2: t.theta2() });
    }
    let Magnetization { m, near_critical } = solve_magnetization(t);
    let th2 = t.theta2();
    let u = (1.0 - m) * (1.0 + m);
    let one = 1.0 - th2 * u;
    let two = 1.0 - 2.0 * th2 * u;
    Ok(AsymptoticConstants {
        theta: t,
        domain,
        m,
        near_critical,
        mu: 2.0 * th2 * m * u / (one * two),
        tau1: 2.0 * u / two,
        tau2: u / one,
        eta1: 1.0 / (th2 * two),
        eta2: 1.0 / (th2 * one),
        a1: th2 - th2 * th2 * u,
        a2: th2 * th2 * u,
        a3: 2.0 * th2.powi(3) * m * u,
        a4: 2.0 * th2.powi(4) * u * (1.0 - 3.0 * m * m),
        p_plus: (1.0 + m) / 2.0,
        p_minus: (1.0 - m) / 2.0,
        stability: check_stability(t),
    })
}

/// JSON shape of the `predict` command.
#[derive(Clone, Debug, Serialize)]
pub struct Prediction {
    #[serde(serialize_with = "json_real")]
    pub theta1: f64,
    #[serde(serialize_with = "json_real")]
    pub theta2: f64,
    pub domain: &'static str,
    #[serde(serialize_with = "json_real")]
    pub m: f64,
    #[serde(serialize_with = "json_real")]
    pub mu: f64,
    #[serde(serialize_with = "json_real")]
    pub tau1: f64,
    #[serde(serialize_with = "json_real")]
    pub tau2: f64,
    #[serde(serialize_with = "json_real")]
    pub eta1: f64,
    #[serde(serialize_with = "json_real")]
    pub eta2: f64,
    #[serde(serialize_with = "json_real")]
    pub a1: f64,
    #[serde(serialize_with = "json_real")]
    pub a2: f64,
    #[serde(serialize_with = "json_real")]
    pub a3: f64,
    #[serde(serialize_with = "json_real")]
    pub a4: f64,
    #[serde(serialize_with = "json_real")]
    pub p_plus: f64,
    #[serde(serialize_with = "json_real")]
    pub p_minus: f64,
    #[serde(serialize_with = "json_real")]
    pub stability: f64,
    pub near_critical: bool,
}

impl From<&AsymptoticConstants> for Prediction {
    fn from(c: &AsymptoticConstants) -> Self {
        Prediction {
            theta1: c.theta.theta1(),
            theta2: c.theta.theta2(),
            domain: c.domain.name(),
            m: c.m,
            mu: c.mu,
            tau1: c.tau1,
            tau2: c.tau2,
            eta1: c.eta1,
            eta2: c.eta2,
            a1: c.a1,
            a2: c.a2,
            a3: c.a3,
            a4: c.a4,
            p_plus: c.p_plus,
            p_minus: c.p_minus,
            stability: c.stability,
            near_critical: c.near_critical,
        }
    }
}

/// Limit of `log Z_n / n^2` and the edge density attaining it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogPartitionLimit {
    pub value: f64,
    pub maximizer: f64,
}

fn logistic(u: f64) -> f64 {
    if u >= 0.0 {
        1.0 / (1.0 + (-u).exp())
    } else {
        let e = u.exp();
        e / (1.0 + e)
    }
}

/// `beta1 p + beta2 p^2 + H(p)` with the binary entropy `H`.
fn free_energy(b: Beta, p: f64) -> f64 {
    let entropy = if p <= 0.0 || p >= 1.0 { 0.0 } else { -p * p.ln() - (1.0 - p) * (-p).ln_1p() };
    b.beta1() * p + b.beta2() * p * p + entropy
}

fn golden_max(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..200 {
        if hi - lo <= 1e-15 {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

/// `(1/2) sup_{0<p<1} {beta1 p + beta2 p^2 - p log p - (1-p) log(1-p)}`.
///
/// The objective is concave outside the band where `p(1-p) > 1/(2 beta2)`,
/// so each concave piece is maximized by golden section on
/// `(1e-9, 1 - 1e-9)`; the result is then polished by Newton on the
/// stationarity condition `p = logistic(beta1 + 2 beta2 p)` in logit
/// coordinates, which may leave the search interval when the optimum is
/// closer to the boundary.
pub fn limiting_log_partition(b: Beta) -> LogPartitionLimit {
    const EDGE: f64 = 1e-9;
    let f = |p: f64| free_energy(b, p);
    let pieces = if b.beta2() > 2.0 {
        let half_width = 0.5 * (1.0 - 2.0 / b.beta2()).sqrt();
        vec![(EDGE, 0.5 - half_width), (0.5 + half_width, 1.0 - EDGE)]
    } else {
        vec![(EDGE, 1.0 - EDGE)]
    };

    let mut best = LogPartitionLimit { value: f64::NEG_INFINITY, maximizer: f64::NAN };
    for (lo, hi) in pieces {
        let p0 = golden_max(f, lo, hi);
        // Newton on h(u) = u - beta1 - 2 beta2 logistic(u), increasing on the piece
        let mut u = (p0 / (1.0 - p0)).ln();
        for _ in 0..60 {
            let s = logistic(u);
            let h = u - b.beta1() - 2.0 * b.beta2() * s;
            let dh = 1.0 - 2.0 * b.beta2() * s * (1.0 - s);
            if dh <= 0.0 {
                break;
            }
            let next = u - h / dh;
            if !next.is_finite() || f(logistic(next)) < f(logistic(u)) {
                break;
            }
            let done = (next - u).abs() <= 1e-15 * u.abs().max(1.0);
            u = next;
            if done {
                break;
            }
        }
        let p = logistic(u);
        let value = f(p) / 2.0;
        if value > best.value {
            best = LogPartitionLimit { value, maximizer: p };
        }
    }
    best
}

/// Normal limit of `(n-1)(S1 - center)` on one phase.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalBranch {
    pub weight: f64,
    pub center: f64,
    pub mean: f64,
    pub variance: f64,
}

/// Predicted law of the recentred edge statistic at a given `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct EdgeLaw {
    pub n: usize,
    pub branches: Vec<NormalBranch>,
}

impl EdgeLaw {
    /// Approximate mean of S1 itself on branch `k`.
    pub fn s1_mean(&self, k: usize) -> f64 {
        let b = &self.branches[k];
        b.center + b.mean / (self.n - 1) as f64
    }

    pub fn s1_variance(&self, k: usize) -> f64 {
        let scale = (self.n - 1) as f64;
        self.branches[k].variance / (scale * scale)
    }
}

/// Limit law of `(n-1)(S1 - m)`: a single Normal `N(-mu, tau1)` on the
/// uniqueness region; on the two-phase region, conditional Normals
/// `N(-mu, tau1)` around `+m` and `N(mu, tau1)` around `-m`, each with weight 1/2.
pub fn predicted_edge_law(t: Theta, n: usize) -> Result<EdgeLaw> {
    if n < 2 {
        return Err(Error::Input(format!("n must be at least 2, got {n}")));
    }
    let c = constants(t)?;
    let branches = if c.domain == DomainClass::Theta2 {
        vec![
            NormalBranch { weight: 0.5, center: c.m, mean: -c.mu, variance: c.tau1 },
            NormalBranch { weight: 0.5, center: -c.m, mean: c.mu, variance: c.tau1 },
        ]
    } else {
        vec![NormalBranch { weight: 1.0, center: c.m, mean: -c.mu, variance: c.tau1 }]
    };
    Ok(EdgeLaw { n, branches })
}

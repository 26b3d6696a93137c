//! The divergence-entropy function d(ε) over finite alphabets.
//!
//! Given a source distribution `p`, d(ε) is the smallest divergence to `p`
//! achievable by any distribution whose entropy is at most ε bits. The
//! objective is convex in `q` but the entropy constraint is concave, so the
//! problem is solved by a penalty convex-concave procedure: the entropy is
//! linearized at the current iterate (the tangent of a concave function
//! lies above it, so the linearized constraint is an inner approximation
//! and feasibility at convergence is genuine), and the convex subproblem is
//! solved exactly through its KKT conditions by a nested bisection on the
//! two multipliers.
//!
//! A brute-force simplex-grid oracle for alphabets up to 4 symbols provides
//! independent ground truth.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const LN_2: f64 = std::f64::consts::LN_2;

/// A PMF over a finite alphabet. Masses are validated on construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteDistribution {
    masses: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates masses: all in [0, 1] after a sum check, total within
    /// 1e-9 of 1. The stored vector is rescaled so it sums to 1 exactly up
    /// to roundoff.
    pub fn new(masses: Vec<f64>) -> Result<Self> {
        if masses.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        for (i, &m) in masses.iter().enumerate() {
            if !m.is_finite() || !(0.0..=1.0 + 1e-9).contains(&m) {
                return Err(Error::InvalidDistribution(format!(
                    "mass {m} at index {i} is not a probability"
                )));
            }
        }
        let total: f64 = masses.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidDistribution(format!(
                "masses sum to {total}, expected 1"
            )));
        }
        let masses = masses.into_iter().map(|m| m / total).collect();
        Ok(Self { masses })
    }

    /// Uniform distribution over `n` symbols.
    pub fn uniform(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        Ok(Self { masses: vec![1.0 / n as f64; n] })
    }

    /// Point mass at `index`.
    pub fn point_mass(n: usize, index: usize) -> Result<Self> {
        if index >= n {
            return Err(Error::InvalidDistribution(format!(
                "index {index} outside alphabet of size {n}"
            )));
        }
        let mut masses = vec![0.0; n];
        masses[index] = 1.0;
        Ok(Self { masses })
    }

    /// Parses whitespace- or comma-separated masses.
    pub fn parse(text: &str) -> Result<Self> {
        let masses: Vec<f64> = text
            .split(|c: char| c.is_whitespace() || c == ',')
            .filter(|t| !t.is_empty())
            .map(|t| {
                t.parse::<f64>().map_err(|_| {
                    Error::InvalidDistribution(format!("cannot parse mass {t:?}"))
                })
            })
            .collect::<Result<_>>()?;
        Self::new(masses)
    }

    pub fn alphabet_size(&self) -> usize {
        self.masses.len()
    }

    pub fn masses(&self) -> &[f64] {
        &self.masses
    }

    /// Shannon entropy in bits, with 0·log 0 = 0.
    pub fn entropy(&self) -> f64 {
        entropy_bits(&self.masses)
    }

    /// Index of the largest mass; ties break to the lowest index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &m) in self.masses.iter().enumerate() {
            if m > self.masses[best] {
                best = i;
            }
        }
        best
    }
}

fn entropy_bits(masses: &[f64]) -> f64 {
    masses
        .iter()
        .filter(|&&m| m > 0.0)
        .map(|&m| -m * m.log2())
        .sum()
}

/// Which divergence the objective uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DivergenceKind {
    Kl,
    Js,
}

impl std::str::FromStr for DivergenceKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "kl" => Ok(Self::Kl),
            "js" => Ok(Self::Js),
            other => Err(Error::Domain(format!("unknown divergence {other:?}"))),
        }
    }
}

/// KL(p‖q) or JS(p, q) in bits. KL is +∞ when q lacks mass somewhere p has
/// it; JS is bounded by 1 bit.
pub fn divergence(
    p: &DiscreteDistribution,
    q: &DiscreteDistribution,
    kind: DivergenceKind,
) -> Result<f64> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(Error::AlphabetMismatch {
            left: p.alphabet_size(),
            right: q.alphabet_size(),
        });
    }
    Ok(match kind {
        DivergenceKind::Kl => kl_bits(p.masses(), q.masses()),
        DivergenceKind::Js => {
            let m: Vec<f64> = p
                .masses()
                .iter()
                .zip(q.masses())
                .map(|(&a, &b)| 0.5 * (a + b))
                .collect();
            0.5 * kl_bits(p.masses(), &m) + 0.5 * kl_bits(q.masses(), &m)
        }
    })
}

fn kl_bits(p: &[f64], q: &[f64]) -> f64 {
    let mut acc = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        if a > 0.0 {
            if b <= 0.0 {
                return f64::INFINITY;
            }
            acc += a * (a / b).log2();
        }
    }
    acc.max(0.0)
}

/// Penalty CCP parameters. Defaults follow the values used throughout the
/// test suites.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Simplex floor δ: every iterate keeps q ≥ δ so KL stays finite and
    /// the entropy gradient stays bounded.
    pub floor: f64,
    /// Initial penalty coefficient τ₀.
    pub initial_penalty: f64,
    /// Penalty growth factor μ > 1.
    pub penalty_growth: f64,
    /// Penalty cap τ_max.
    pub penalty_cap: f64,
    /// Maximum CCP iterations.
    pub max_iterations: usize,
    /// KKT residual tolerance for the convex subproblem.
    pub subproblem_tol: f64,
    /// Stop when the objective changes less than this and the slack is
    /// essentially zero.
    pub ccp_tol: f64,
    pub divergence: DivergenceKind,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            floor: 1e-12,
            initial_penalty: 1.0,
            penalty_growth: 5.0,
            penalty_cap: 1e6,
            max_iterations: 200,
            subproblem_tol: 1e-9,
            ccp_tol: 1e-7,
            divergence: DivergenceKind::Kl,
        }
    }
}

impl SolverConfig {
    fn validate(&self, alphabet: usize) -> Result<()> {
        if !(self.floor > 0.0 && self.floor * (alphabet as f64) < 1.0) {
            return Err(Error::Domain(format!(
                "floor {} infeasible for alphabet of {alphabet}",
                self.floor
            )));
        }
        if self.initial_penalty <= 0.0
            || self.penalty_growth <= 1.0
            || self.penalty_cap < self.initial_penalty
            || self.subproblem_tol <= 0.0
            || self.ccp_tol <= 0.0
            || self.max_iterations == 0
        {
            return Err(Error::Domain("solver config fields must be positive".into()));
        }
        Ok(())
    }
}

/// One solved point of the d(ε) curve.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TradeoffPoint {
    pub epsilon: f64,
    /// Divergence in bits; `+∞` for the KL answer at ε = 0.
    pub divergence_value: f64,
    pub q_star: DiscreteDistribution,
    /// max(0, H(q*) − ε).
    pub feasibility_gap: f64,
    pub iterations: usize,
    pub converged: bool,
}

/// A swept curve with the raw solver values and the isotonic
/// (running-minimum) repair layer.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TradeoffCurve {
    pub points: Vec<TradeoffPoint>,
    /// Raw divergences, one per grid point.
    pub raw: Vec<f64>,
    /// Exactly non-increasing repaired divergences.
    pub isotonic: Vec<f64>,
    /// Largest raw increase between consecutive points (0 when monotone).
    pub max_raw_violation: f64,
    /// True when the raw violation exceeds 1e-4 bits, pointing at solver
    /// suboptimality on some point.
    pub suboptimality_flag: bool,
}

/// The convexified inner problem of the CCP step:
///
///   min  divergence(p, q) + τ·s
///   s.t. Σq = 1,  q ≥ δ,  Σ aₓ qₓ ≤ rhs + s,  s ≥ 0
///
/// where `a` is the entropy gradient at the linearization point and `rhs`
/// absorbs the constant part of the tangent. Solved through the KKT
/// system: stationarity gives a closed form per coordinate in the two
/// multipliers (ν for the simplex, λ ∈ [0, τ] for the linear constraint),
/// reduced to a nested bisection. Slack s > 0 forces λ = τ.
pub fn convex_subproblem(
    p: &DiscreteDistribution,
    a: &[f64],
    rhs: f64,
    tau: f64,
    floor: f64,
    tol: f64,
    kind: DivergenceKind,
) -> (Vec<f64>, f64) {
    let n = p.alphabet_size();
    debug_assert_eq!(a.len(), n);
    let pm = p.masses();

    // per-coordinate stationarity solution given w = ν + λ aₓ
    let coord = |px: f64, w: f64| -> f64 {
        if px <= 0.0 {
            return floor;
        }
        let q = match kind {
            DivergenceKind::Kl => {
                if w <= 0.0 {
                    f64::INFINITY
                } else {
                    px / (LN_2 * w)
                }
            }
            DivergenceKind::Js => {
                // 0.5·log2(2q/(p+q)) + w = 0  =>  q = t·p/(2−t), t = 2^(−2w)
                let t = (-2.0 * w * LN_2).exp();
                if t >= 2.0 {
                    f64::INFINITY
                } else {
                    px * t / (2.0 - t)
                }
            }
        };
        q.clamp(floor, 4.0)
    };

    // inner bisection: ν such that Σ q(ν, λ) = 1
    let solve_nu = |lambda: f64| -> Vec<f64> {
        let nu_min = pm
            .iter()
            .zip(a)
            .filter(|(&px, _)| px > 0.0)
            .map(|(_, &ax)| -lambda * ax)
            .fold(f64::NEG_INFINITY, f64::max);
        let sum_at = |nu: f64| -> f64 { pm.iter().zip(a).map(|(&px, &ax)| coord(px, nu + lambda * ax)).sum() };
        let mut lo = nu_min;
        let mut hi = nu_min.abs().max(1.0);
        while sum_at(hi) > 1.0 {
            hi = nu_min + (hi - nu_min) * 2.0 + 1.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if sum_at(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let nu = 0.5 * (lo + hi);
        let mut q: Vec<f64> = pm.iter().zip(a).map(|(&px, &ax)| coord(px, nu + lambda * ax)).collect();
        // exact renormalization of the free coordinates
        let clamped: f64 = q.iter().filter(|&&x| x <= floor).count() as f64 * floor;
        let free: f64 = q.iter().filter(|&&x| x > floor).sum();
        if free > 0.0 {
            let scale = (1.0 - clamped) / free;
            for x in q.iter_mut() {
                if *x > floor {
                    *x *= scale;
                }
            }
        }
        q
    };

    let violation = |q: &[f64]| -> f64 { q.iter().zip(a).map(|(&qx, &ax)| qx * ax).sum::<f64>() - rhs };

    // λ = 0: constraint may already be slack at the unconstrained optimum
    let q0 = solve_nu(0.0);
    if violation(&q0) <= tol {
        return (q0, 0.0);
    }
    // λ = τ: if still violated, the slack absorbs the rest
    let q_tau = solve_nu(tau);
    let v_tau = violation(&q_tau);
    if v_tau >= 0.0 {
        return (q_tau, v_tau.max(0.0));
    }
    // root of the violation in λ ∈ (0, τ)
    let (mut lo, mut hi) = (0.0, tau);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = violation(&solve_nu(mid));
        if v > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if v.abs() <= tol {
            break;
        }
    }
    (solve_nu(0.5 * (lo + hi)), 0.0)
}

/// Projects `p` onto the δ-floored simplex (used as the CCP start).
fn floored(p: &[f64], floor: f64) -> Vec<f64> {
    let mut q: Vec<f64> = p.iter().map(|&x| x.max(floor)).collect();
    let clamped: f64 = q.iter().filter(|&&x| x <= floor).count() as f64 * floor;
    let free: f64 = q.iter().filter(|&&x| x > floor).sum();
    if free > 0.0 {
        let scale = (1.0 - clamped) / free;
        for x in q.iter_mut() {
            if *x > floor {
                *x *= scale;
            }
        }
    }
    q
}

fn divergence_to(p: &DiscreteDistribution, q: &[f64], kind: DivergenceKind) -> f64 {
    let qd = DiscreteDistribution { masses: q.to_vec() };
    divergence(p, &qd, kind).expect("same alphabet")
}

/// Solves d(ε) for one ε by the penalty CCP, starting from `q0` (the
/// δ-floored source by default; sweeps also retry from the neighboring
/// solution).
fn solve_from(
    p: &DiscreteDistribution,
    epsilon: f64,
    cfg: &SolverConfig,
    q0: Vec<f64>,
) -> TradeoffPoint {
    let mut q = q0;
    let mut tau = cfg.initial_penalty;
    let mut prev_obj = f64::INFINITY;
    let mut converged = false;
    let mut iterations = 0;
    let mut slack = f64::INFINITY;
    for iter in 1..=cfg.max_iterations {
        iterations = iter;
        // tangent of H at q: H(q') ≈ H(q) + Σ aₓ (q'ₓ − qₓ)
        let a: Vec<f64> = q.iter().map(|&x| -(x.log2() + 1.0 / LN_2)).collect();
        let h = entropy_bits(&q);
        let tangent_const = h - q.iter().zip(&a).map(|(&x, &ax)| x * ax).sum::<f64>();
        let rhs = epsilon - tangent_const;
        let (q_new, s) =
            convex_subproblem(p, &a, rhs, tau, cfg.floor, cfg.subproblem_tol, cfg.divergence);
        let obj = divergence_to(p, &q_new, cfg.divergence) + tau * s;
        q = q_new;
        slack = s;
        if (prev_obj - obj).abs() < cfg.ccp_tol && s < 1e-9 {
            converged = true;
            break;
        }
        prev_obj = obj;
        tau = (tau * cfg.penalty_growth).min(cfg.penalty_cap);
    }
    let h_q = entropy_bits(&q);
    let d = divergence_to(p, &q, cfg.divergence);
    TradeoffPoint {
        epsilon,
        divergence_value: d,
        q_star: DiscreteDistribution { masses: q },
        feasibility_gap: (h_q - epsilon).max(0.0),
        iterations,
        converged: converged && slack < 1e-9,
    }
}

/// Solves the divergence-entropy problem at one ε.
///
/// ε = 0 is answered directly from the closed form: the optimal support is
/// the single most likely symbol (ties to the lowest index); under KL the
/// reported value is +∞, under JS the divergence to that point mass.
pub fn solve_tradeoff(
    p: &DiscreteDistribution,
    epsilon: f64,
    cfg: &SolverConfig,
) -> Result<TradeoffPoint> {
    cfg.validate(p.alphabet_size())?;
    if !(epsilon >= 0.0) {
        return Err(Error::Domain(format!("epsilon must be nonnegative, got {epsilon}")));
    }
    if epsilon == 0.0 {
        let n = p.alphabet_size();
        let mut q = vec![cfg.floor; n];
        q[p.argmax()] = 1.0 - cfg.floor * (n as f64 - 1.0);
        let d = match cfg.divergence {
            DivergenceKind::Kl => f64::INFINITY,
            DivergenceKind::Js => divergence_to(p, &q, DivergenceKind::Js),
        };
        let h_q = entropy_bits(&q);
        return Ok(TradeoffPoint {
            epsilon,
            divergence_value: d,
            q_star: DiscreteDistribution { masses: q },
            feasibility_gap: h_q.max(0.0),
            iterations: 0,
            converged: true,
        });
    }
    Ok(solve_from(p, epsilon, cfg, floored(p.masses(), cfg.floor)))
}

fn better(a: TradeoffPoint, b: TradeoffPoint) -> TradeoffPoint {
    // prefer feasible converged points with the smaller divergence
    let key = |t: &TradeoffPoint| {
        (
            !(t.feasibility_gap <= 1e-6),
            !t.converged,
            t.divergence_value,
        )
    };
    if key(&b) < key(&a) {
        b
    } else {
        a
    }
}

/// Sweeps d(ε) over a strictly increasing ε grid.
///
/// Every point is solved cold (from the source), in parallel; a second
/// sequential pass warm-starts each point from its predecessor's solution
/// and the better of the two is kept. The returned curve carries both the
/// raw values and an exactly non-increasing isotonic repair.
pub fn sweep_curve(
    p: &DiscreteDistribution,
    epsilons: &[f64],
    cfg: &SolverConfig,
) -> Result<TradeoffCurve> {
    cfg.validate(p.alphabet_size())?;
    if epsilons.is_empty() {
        return Err(Error::Domain("empty epsilon grid".into()));
    }
    if epsilons.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Domain("epsilon grid must be strictly increasing".into()));
    }
    // cold pass, independent points
    let mut points: Vec<TradeoffPoint> = epsilons
        .par_iter()
        .map(|&eps| solve_tradeoff(p, eps, cfg))
        .collect::<Result<_>>()?;
    // warm pass, sequential
    for i in 1..points.len() {
        let eps = epsilons[i];
        if eps == 0.0 {
            continue;
        }
        let warm_start = points[i - 1].q_star.masses().to_vec();
        let warm = solve_from(p, eps, cfg, floored(&warm_start, cfg.floor));
        let cold = points[i].clone();
        points[i] = better(cold, warm);
    }
    let raw: Vec<f64> = points.iter().map(|t| t.divergence_value).collect();
    let mut isotonic = raw.clone();
    for i in 1..isotonic.len() {
        isotonic[i] = isotonic[i].min(isotonic[i - 1]);
    }
    let max_raw_violation = raw
        .windows(2)
        .map(|w| (w[1] - w[0]).max(0.0))
        .fold(0.0, f64::max);
    Ok(TradeoffCurve {
        suboptimality_flag: max_raw_violation > 1e-4,
        points,
        raw,
        isotonic,
        max_raw_violation,
    })
}

/// Brute-force ground truth: scans the probability simplex at resolution
/// `grid_step` and keeps the minimum divergence among grid points whose
/// entropy is at most ε. Refuses alphabets larger than 4.
pub fn oracle_tradeoff(
    p: &DiscreteDistribution,
    epsilon: f64,
    grid_step: f64,
    kind: DivergenceKind,
) -> Result<f64> {
    let n = p.alphabet_size();
    if n > 4 {
        return Err(Error::OracleAlphabetTooLarge(n));
    }
    if !(grid_step > 0.0 && grid_step < 1.0) {
        return Err(Error::Domain(format!("bad grid step {grid_step}")));
    }
    let steps = (1.0 / grid_step).round() as u64;
    let mut best = f64::INFINITY;
    let mut q = vec![0.0; n];
    scan_simplex(p, epsilon, kind, steps, steps, 0, &mut q, &mut best);
    Ok(best)
}

fn scan_simplex(
    p: &DiscreteDistribution,
    epsilon: f64,
    kind: DivergenceKind,
    steps: u64,
    remaining: u64,
    index: usize,
    q: &mut Vec<f64>,
    best: &mut f64,
) {
    let n = p.alphabet_size();
    if index == n - 1 {
        q[index] = remaining as f64 / steps as f64;
        if entropy_bits(q) <= epsilon {
            let d = kl_or_js(p.masses(), q, kind);
            if d < *best {
                *best = d;
            }
        }
        return;
    }
    for k in 0..=remaining {
        q[index] = k as f64 / steps as f64;
        scan_simplex(p, epsilon, kind, steps, remaining - k, index + 1, q, best);
    }
}

fn kl_or_js(p: &[f64], q: &[f64], kind: DivergenceKind) -> f64 {
    match kind {
        DivergenceKind::Kl => kl_bits(p, q),
        DivergenceKind::Js => {
            let m: Vec<f64> = p.iter().zip(q).map(|(&a, &b)| 0.5 * (a + b)).collect();
            0.5 * kl_bits(p, &m) + 0.5 * kl_bits(q, &m)
        }
    }
}

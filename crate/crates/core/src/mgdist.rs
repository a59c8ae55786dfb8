//! Mixture-of-Gamma (MG) distributions and nested exceedance probabilities.
//!
//! Every power gain in the system (G2G, A2G and SIC residuals) is an MG variate
//! with integer shapes. The outage analysis reduces to chained exceedance
//! probabilities
//!
//! `I_n = Pr[X0 > p0 X1 + q0, X1 > p1 X2 + q1, ..., Xn > w]`
//!
//! over independent MG variates, which have finite-sum closed forms because
//! integer-shape Gamma survival functions are exponential polynomials.
//! `exceed_i1`/`exceed_i2` write the double and triple sums out explicitly;
//! `exceed_in` reaches any depth by folding an exponential-polynomial term list
//! through the chain. The two routes share no code beyond the primitives.

use rand::Rng;

use crate::channel::{erlang, uniform, A2GLinkParams, ResidualParams, ShadowedRicianParams};
use crate::error::{invalid, Error, Result};
use crate::num::{ln_factorial, Real};

/// One Gamma component: weight `chi`, scale `omega`, integer shape `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgComponent<T> {
    pub chi: T,
    pub omega: T,
    pub mu: u32,
}

impl<T: Real> MgComponent<T> {
    pub fn new(chi: T, omega: T, mu: u32) -> Self {
        Self { chi, omega, mu }
    }

    /// `ln(chi / (omega^mu (mu - 1)!))`, the log of the density prefactor.
    fn ln_xi(&self) -> T {
        self.chi.ln() - T::from_count(self.mu as usize) * self.omega.ln() - ln_factorial::<T>(self.mu as usize - 1)
    }
}

/// Finite Gamma mixture with non-negative weights summing to one.
#[derive(Debug, Clone, PartialEq)]
pub struct MgDist<T> {
    components: Vec<MgComponent<T>>,
}

const NORMALIZATION_TOL: f64 = 1e-9;

impl<T: Real> MgDist<T> {
    /// Builds a mixture, rejecting weights that do not sum to one.
    pub fn new(components: Vec<MgComponent<T>>) -> Result<Self> {
        validate_components(&components)?;
        let total: T = components.iter().map(|c| c.chi).sum();
        let tol = T::lit(NORMALIZATION_TOL).max(T::epsilon() * T::lit(64.0));
        if (total - T::one()).abs() > tol {
            return Err(invalid("chi", format!("weights sum to {total}, expected 1")));
        }
        Ok(Self { components })
    }

    /// Builds a mixture and rescales the weights to sum to exactly one.
    pub fn normalized(components: Vec<MgComponent<T>>) -> Result<Self> {
        validate_components(&components)?;
        let total: T = components.iter().map(|c| c.chi).sum();
        if !(total > T::zero()) {
            return Err(invalid("chi", "weights sum to zero"));
        }
        if (total - T::one()).abs().as_f64() > 1e-6 {
            log::warn!("mixture weights renormalized by factor {total}");
        }
        let components = components
            .into_iter()
            .filter(|c| c.chi > T::zero())
            .map(|c| MgComponent { chi: c.chi / total, ..c })
            .collect();
        Ok(Self { components })
    }

    /// Exponential distribution with the given mean.
    pub fn exponential(mean: T) -> Self {
        Self::gamma(1, mean)
    }

    /// Single Gamma with integer shape and scale.
    pub fn gamma(mu: u32, omega: T) -> Self {
        assert!(mu >= 1 && omega > T::zero(), "invalid gamma component");
        Self { components: vec![MgComponent::new(T::one(), omega, mu)] }
    }

    pub fn components(&self) -> &[MgComponent<T>] {
        &self.components
    }

    pub fn weight_sum(&self) -> T {
        self.components.iter().map(|c| c.chi).sum()
    }

    pub fn mean(&self) -> T {
        self.components
            .iter()
            .map(|c| c.chi * c.omega * T::from_count(c.mu as usize))
            .sum()
    }

    pub fn pdf(&self, x: T) -> Result<T> {
        if x < T::zero() {
            return Err(Error::Domain(format!("MG density at negative x = {x}")));
        }
        Ok(self
            .components
            .iter()
            .map(|c| {
                if x == T::zero() {
                    return if c.mu == 1 { c.chi / c.omega } else { T::zero() };
                }
                let k = T::from_count(c.mu as usize);
                (c.ln_xi() + (k - T::one()) * x.ln() - x / c.omega).exp()
            })
            .sum())
    }

    pub fn cdf(&self, x: T) -> Result<T> {
        if x < T::zero() {
            return Err(Error::Domain(format!("MG CDF at negative x = {x}")));
        }
        let v: T = self
            .components
            .iter()
            .map(|c| c.chi * regularized_lower_gamma(c.mu as usize, x / c.omega))
            .sum();
        Ok(v.max(T::zero()).min(T::one()))
    }

    /// `Pr[X > x]`, computed without cancellation.
    pub fn survival(&self, x: T) -> T {
        if x <= T::zero() {
            return T::one();
        }
        let v: T = self
            .components
            .iter()
            .map(|c| c.chi * regularized_upper_gamma(c.mu as usize, x / c.omega))
            .sum();
        v.max(T::zero()).min(T::one())
    }

    /// Component selection by weight, then an integer-shape Gamma draw.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> T {
        let u: T = uniform(rng);
        let mut acc = T::zero();
        let last = self.components.len() - 1;
        for (i, c) in self.components.iter().enumerate() {
            acc = acc + c.chi;
            if u < acc || i == last {
                return erlang(c.mu, c.omega, rng);
            }
        }
        unreachable!("mixture has at least one component")
    }

    /// Exact mixture form of `g_CF^2 * L_CF` under shadowed Rician fading.
    pub fn from_g2g(sr: &ShadowedRicianParams<T>, pathloss: T) -> Self {
        let alpha = sr.alpha();
        let rate = sr.beta() - sr.delta();
        let scale = pathloss / rate;
        let comps = (0..sr.m as usize)
            .map(|l| {
                let chi = alpha * sr.zeta(l) / rate.powi(l as i32 + 1);
                MgComponent::new(chi, scale, l as u32 + 1)
            })
            .collect();
        Self::normalized(comps).expect("shadowed Rician mixture is valid")
    }

    /// Two-component mixture of an A2G power gain: Gamma(m) on LoS,
    /// exponential on NLoS. Zero-probability branches are dropped.
    pub fn from_a2g(link: &A2GLinkParams<T>, d: T) -> Self {
        let m = T::from_count(link.m as usize);
        let mut comps = Vec::with_capacity(2);
        if link.p_los > T::zero() {
            comps.push(MgComponent::new(link.p_los, link.los_gain(d) / m, link.m));
        }
        if link.p_los < T::one() {
            comps.push(MgComponent::new(T::one() - link.p_los, link.nlos_gain(d), 1));
        }
        Self::new(comps).expect("A2G mixture is valid")
    }

    /// Exponential residual with mean `xi * mean_gain`; `None` when `xi = 0`,
    /// meaning the residual is identically zero.
    pub fn from_residual(res: &ResidualParams<T>) -> Option<Self> {
        (res.xi > T::zero()).then(|| Self::exponential(res.mean()))
    }
}

fn validate_components<T: Real>(components: &[MgComponent<T>]) -> Result<()> {
    if components.is_empty() {
        return Err(invalid("components", "mixture needs at least one component"));
    }
    for c in components {
        if !(c.omega > T::zero()) || !c.omega.is_finite() {
            return Err(invalid("omega", format!("scale must be positive, got {}", c.omega)));
        }
        if c.mu < 1 {
            return Err(invalid("mu", "shape must be an integer >= 1"));
        }
        if !(c.chi >= T::zero()) || !c.chi.is_finite() {
            return Err(invalid("chi", format!("weight must be non-negative, got {}", c.chi)));
        }
    }
    Ok(())
}

pub fn mg_pdf<T: Real>(d: &MgDist<T>, x: T) -> Result<T> {
    d.pdf(x)
}

pub fn mg_cdf<T: Real>(d: &MgDist<T>, x: T) -> Result<T> {
    d.cdf(x)
}

/// `ln(sum_{k<n} x^k / k!)` by log-sum-exp.
fn ln_partial_exp<T: Real>(n: usize, x: T) -> T {
    if x == T::zero() {
        return T::zero();
    }
    let lx = x.ln();
    let terms: Vec<T> = (0..n)
        .map(|k| T::from_count(k) * lx - ln_factorial::<T>(k))
        .collect();
    log_sum_exp(&terms)
}

fn log_sum_exp<T: Real>(terms: &[T]) -> T {
    let max = terms.iter().copied().fold(T::neg_infinity(), T::max);
    if max == T::neg_infinity() {
        return max;
    }
    max + terms.iter().map(|&t| (t - max).exp()).sum::<T>().ln()
}

/// `ln Gamma(n, x)` for integer `n >= 1`; `-inf` at `x = inf`.
pub fn ln_upper_gamma_int<T: Real>(n: usize, x: T) -> T {
    if x == T::infinity() {
        return T::neg_infinity();
    }
    ln_factorial::<T>(n - 1) + ln_regularized_upper(n, x)
}

fn ln_regularized_upper<T: Real>(n: usize, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    -x + ln_partial_exp::<T>(n, x)
}

/// Upper incomplete gamma `Gamma(n, x) = (n-1)! e^{-x} sum_{k<n} x^k/k!`.
pub fn upper_gamma_int<T: Real>(n: i64, x: T) -> Result<T> {
    if n < 1 {
        return Err(Error::Domain(format!("upper_gamma_int needs n >= 1, got {n}")));
    }
    if x < T::zero() {
        return Err(Error::Domain(format!("upper_gamma_int needs x >= 0, got {x}")));
    }
    Ok(ln_upper_gamma_int(n as usize, x).exp())
}

/// `Q(n, x) = Gamma(n, x) / (n-1)!`.
pub fn regularized_upper_gamma<T: Real>(n: usize, x: T) -> T {
    if x <= T::zero() {
        return T::one();
    }
    if x < T::from_count(n) {
        return T::one() - regularized_lower_gamma(n, x);
    }
    ln_regularized_upper(n, x).exp()
}

/// `P(n, x) = 1 - Q(n, x)`, by its power series below `x = n` so that small
/// probabilities keep full relative precision.
pub fn regularized_lower_gamma<T: Real>(n: usize, x: T) -> T {
    if x <= T::zero() {
        return T::zero();
    }
    if x >= T::from_count(n) {
        return T::one() - ln_regularized_upper(n, x).exp();
    }
    // e^{-x} x^n / n! * sum_j x^j / ((n+1)...(n+j))
    let mut term = T::one();
    let mut sum = T::one();
    for j in 1..1000 {
        term = term * x / T::from_count(n + j);
        sum = sum + term;
        if term < sum * T::epsilon() {
            break;
        }
    }
    (T::from_count(n) * x.ln() - x - ln_factorial::<T>(n) + sum.ln()).exp()
}

/// Slopes, offsets and terminal threshold of a chained exceedance event.
///
/// `p[i]`, `q[i]` couple `X_i` to `X_{i+1}`; `w` bounds the last variate.
/// Infinite offsets or thresholds are allowed and make the event impossible.
#[derive(Debug, Clone, PartialEq)]
pub struct ExceedanceSpec<T> {
    pub p: Vec<T>,
    pub q: Vec<T>,
    pub w: T,
}

impl<T: Real> ExceedanceSpec<T> {
    pub fn depth0(w: T) -> Self {
        Self { p: vec![], q: vec![], w }
    }

    pub fn depth1(p0: T, q0: T, w: T) -> Self {
        Self { p: vec![p0], q: vec![q0], w }
    }

    pub fn depth2(p0: T, q0: T, p1: T, q1: T, w: T) -> Self {
        Self { p: vec![p0, p1], q: vec![q0, q1], w }
    }

    pub fn depth(&self) -> usize {
        self.p.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.len() != self.q.len() {
            return Err(invalid("q", "slope and offset lists differ in length"));
        }
        for &v in self.p.iter().chain(self.q.iter()).chain(std::iter::once(&self.w)) {
            if !(v >= T::zero()) {
                return Err(invalid("spec", format!("coefficients must be >= 0, got {v}")));
            }
        }
        Ok(())
    }

    fn impossible(&self) -> bool {
        self.p.iter().chain(self.q.iter()).any(|v| v.is_infinite()) || self.w.is_infinite()
    }
}

/// `s * ln(v)` with the convention `0 * ln 0 = 0`.
fn pow_ln<T: Real>(s: usize, v: T) -> T {
    if s == 0 {
        T::zero()
    } else {
        T::from_count(s) * v.ln()
    }
}

fn clamp_prob<T: Real>(v: T) -> T {
    v.max(T::zero()).min(T::one())
}

/// `Pr[X0 > w]`.
pub fn exceed_i0<T: Real>(d0: &MgDist<T>, w: T) -> T {
    if w.is_infinite() {
        return T::zero();
    }
    d0.components
        .iter()
        .map(|c| c.chi * (ln_upper_gamma_int(c.mu as usize, w / c.omega) - ln_factorial::<T>(c.mu as usize - 1)).exp())
        .sum::<T>()
        .min(T::one())
}

/// `Pr[X0 > p0 X1 + q0, X1 > w]`, explicit double sum.
pub fn exceed_i1<T: Real>(d0: &MgDist<T>, d1: &MgDist<T>, spec: &ExceedanceSpec<T>) -> Result<T> {
    spec.validate()?;
    if spec.depth() != 1 {
        return Err(Error::DepthMismatch { dists: 2, links: spec.depth() });
    }
    if spec.impossible() {
        return Ok(T::zero());
    }
    let (p0, q0, w) = (spec.p[0], spec.q[0], spec.w);
    let mut total = T::zero();
    for c0 in &d0.components {
        for c1 in &d1.components {
            let lambda = c1.omega.recip() + p0 / c0.omega;
            let base = c0.chi.ln() + c1.ln_xi() - q0 / c0.omega;
            for i in 0..c0.mu as usize {
                for l in 0..=i {
                    if (p0 == T::zero() && l > 0) || (q0 == T::zero() && i > l) {
                        continue;
                    }
                    let kappa = c1.mu as usize + l;
                    let lt = base - T::from_count(i) * c0.omega.ln() - ln_factorial::<T>(l)
                        - ln_factorial::<T>(i - l)
                        + pow_ln(l, p0)
                        + pow_ln(i - l, q0)
                        + ln_upper_gamma_int(kappa, lambda * w)
                        - T::from_count(kappa) * lambda.ln();
                    total = total + lt.exp();
                }
            }
        }
    }
    Ok(clamp_prob(total))
}

/// `Pr[X0 > p0 X1 + q0, X1 > p1 X2 + q1, X2 > w]`, explicit triple sum.
pub fn exceed_i2<T: Real>(
    d0: &MgDist<T>,
    d1: &MgDist<T>,
    d2: &MgDist<T>,
    spec: &ExceedanceSpec<T>,
) -> Result<T> {
    spec.validate()?;
    if spec.depth() != 2 {
        return Err(Error::DepthMismatch { dists: 3, links: spec.depth() });
    }
    if spec.impossible() {
        return Ok(T::zero());
    }
    let (p0, q0, p1, q1, w) = (spec.p[0], spec.q[0], spec.p[1], spec.q[1], spec.w);
    let mut total = T::zero();
    for c0 in &d0.components {
        for c1 in &d1.components {
            let lambda1 = c1.omega.recip() + p0 / c0.omega;
            let base01 = c0.chi.ln() + c1.ln_xi() - q0 / c0.omega;
            for i in 0..c0.mu as usize {
                for l in 0..=i {
                    if (p0 == T::zero() && l > 0) || (q0 == T::zero() && i > l) {
                        continue;
                    }
                    let outer = base01 - T::from_count(i) * c0.omega.ln() - ln_factorial::<T>(l)
                        - ln_factorial::<T>(i - l)
                        + pow_ln(l, p0)
                        + pow_ln(i - l, q0);
                    // int_{p1 x2 + q1}^inf x1^n e^{-lambda1 x1} dx1
                    let n = c1.mu as usize - 1 + l;
                    for k in 0..=n {
                        let mid = outer + ln_factorial::<T>(n) - ln_factorial::<T>(k)
                            - T::from_count(n - k + 1) * lambda1.ln()
                            - lambda1 * q1;
                        for r in 0..=k {
                            if (p1 == T::zero() && r > 0) || (q1 == T::zero() && k > r) {
                                continue;
                            }
                            let coef = mid + ln_factorial::<T>(k) - ln_factorial::<T>(r) - ln_factorial::<T>(k - r)
                                + pow_ln(r, p1)
                                + pow_ln(k - r, q1);
                            for c2 in &d2.components {
                                let lambda2 = c2.omega.recip() + lambda1 * p1;
                                let kappa = c2.mu as usize + r;
                                let lt = coef + c2.ln_xi() + ln_upper_gamma_int(kappa, lambda2 * w)
                                    - T::from_count(kappa) * lambda2.ln();
                                total = total + lt.exp();
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(clamp_prob(total))
}

/// `c x^j e^{-r x}` with `c = exp(ln_c)`.
#[derive(Debug, Clone, Copy)]
struct ExpPolyTerm<T> {
    ln_c: T,
    j: usize,
    r: T,
}

/// Adds a term, merging with an existing one of identical power and rate.
fn push_term<T: Real>(terms: &mut Vec<ExpPolyTerm<T>>, t: ExpPolyTerm<T>) {
    if t.ln_c == T::neg_infinity() {
        return;
    }
    if let Some(e) = terms.iter_mut().find(|e| e.j == t.j && e.r == t.r) {
        let m = e.ln_c.max(t.ln_c);
        e.ln_c = m + ((e.ln_c - m).exp() + (t.ln_c - m).exp()).ln();
    } else {
        terms.push(t);
    }
}

/// `Pr[X0 > p0 X1 + q0, ..., X_{n-1} > p_{n-1} X_n + q_{n-1}, X_n > w]` for
/// any depth, by carrying the conditional survival of the prefix as an
/// exponential polynomial in the next variate.
pub fn exceed_in<T: Real>(dists: &[&MgDist<T>], spec: &ExceedanceSpec<T>) -> Result<T> {
    spec.validate()?;
    let n = spec.depth();
    if dists.len() != n + 1 {
        return Err(Error::DepthMismatch { dists: dists.len(), links: n });
    }
    if spec.impossible() {
        return Ok(T::zero());
    }
    if n == 0 {
        return Ok(exceed_i0(dists[0], spec.w));
    }

    // survival of X0 at p0 x + q0, expanded in x
    let (p0, q0) = (spec.p[0], spec.q[0]);
    let mut terms: Vec<ExpPolyTerm<T>> = Vec::new();
    for c in &dists[0].components {
        for i in 0..c.mu as usize {
            for l in 0..=i {
                if (p0 == T::zero() && l > 0) || (q0 == T::zero() && i > l) {
                    continue;
                }
                let ln_c = c.chi.ln() - q0 / c.omega - T::from_count(i) * c.omega.ln() - ln_factorial::<T>(l)
                    - ln_factorial::<T>(i - l)
                    + pow_ln(l, p0)
                    + pow_ln(i - l, q0);
                push_term(&mut terms, ExpPolyTerm { ln_c, j: l, r: p0 / c.omega });
            }
        }
    }

    for t in 1..n {
        let (p, q) = (spec.p[t], spec.q[t]);
        let mut next = Vec::new();
        for c in &dists[t].components {
            for term in &terms {
                let big_n = c.mu as usize - 1 + term.j;
                let lambda = c.omega.recip() + term.r;
                let pre = term.ln_c + c.ln_xi() - lambda * q;
                for k in 0..=big_n {
                    let mid = pre + ln_factorial::<T>(big_n) - ln_factorial::<T>(k)
                        - T::from_count(big_n - k + 1) * lambda.ln();
                    for s in 0..=k {
                        if (p == T::zero() && s > 0) || (q == T::zero() && k > s) {
                            continue;
                        }
                        let ln_c = mid + ln_factorial::<T>(k) - ln_factorial::<T>(s) - ln_factorial::<T>(k - s)
                            + pow_ln(s, p)
                            + pow_ln(k - s, q);
                        push_term(&mut next, ExpPolyTerm { ln_c, j: s, r: lambda * p });
                    }
                }
            }
        }
        terms = next;
    }

    let w = spec.w;
    let mut total = T::zero();
    for c in &dists[n].components {
        for term in &terms {
            let kappa = c.mu as usize + term.j;
            let lambda = c.omega.recip() + term.r;
            let lt = term.ln_c + c.ln_xi() + ln_upper_gamma_int(kappa, lambda * w)
                - T::from_count(kappa) * lambda.ln();
            total = total + lt.exp();
        }
    }
    Ok(clamp_prob(total))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use crate::quad;

    fn triples(d: &MgDist<f64>) -> Vec<(f64, f64, u32)> {
        d.components().iter().map(|c| (c.chi, c.omega, c.mu)).collect()
    }

    fn random_dist(rng: &mut ChaCha8Rng) -> MgDist<f64> {
        let k = rng.gen_range(1..=3);
        let comps = (0..k)
            .map(|_| MgComponent::new(rng.gen_range(0.1..1.0), rng.gen_range(0.2..2.0), rng.gen_range(1..=4)))
            .collect();
        MgDist::normalized(comps).unwrap()
    }

    fn g2g_reference() -> MgDist<f64> {
        MgDist::from_g2g(&ShadowedRicianParams::new(5, 0.5, 1.0).unwrap(), 1.0)
    }

    #[test]
    fn exponential_pdf_and_cdf() {
        let d = MgDist::exponential(2.0f64);
        assert!((d.pdf(0.0).unwrap() - 0.5).abs() < 1e-15);
        assert!((d.cdf(2.0).unwrap() - (1.0 - (-1.0f64).exp())).abs() < 1e-15);
        assert_eq!(d.cdf(0.0).unwrap(), 0.0);
        assert!((d.cdf(1e4).unwrap() - 1.0).abs() < 1e-15);
        assert!(d.pdf(-1.0).is_err());
        assert!(d.cdf(-1.0).is_err());
    }

    #[test]
    fn g2g_mixture_normalizes_and_integrates() {
        let d = g2g_reference();
        assert_eq!(d.components().len(), 5);
        assert!((d.weight_sum() - 1.0).abs() < 1e-9);
        let mass = quad::integrate_semi_infinite(|x| d.pdf(x).unwrap(), 0.0, 2.0, 1e-12);
        assert!((mass - 1.0).abs() < 1e-6);
    }

    #[test]
    fn g2g_mixture_mean_matches_density_quadrature() {
        // shadowed Rician power density, written with the confluent
        // hypergeometric series instead of the mixture expansion
        let sr = ShadowedRicianParams::new(5, 0.5, 1.0).unwrap();
        let (alpha, beta, delta) = (sr.alpha(), sr.beta(), sr.delta());
        let m = sr.m as f64;
        let hyp = |z: f64| {
            let (mut term, mut sum) = (1.0, 1.0);
            for k in 0..400 {
                let k = k as f64;
                term *= (m + k) / ((1.0 + k) * (1.0 + k)) * z;
                sum += term;
                if term < 1e-17 * sum {
                    break;
                }
            }
            sum
        };
        let pathloss = 3.5;
        let dens = |x: f64| {
            let y = x / pathloss;
            alpha * (-beta * y).exp() * hyp(delta * y) / pathloss
        };
        let mass = quad::integrate_semi_infinite(dens, 0.0, 2.0 * pathloss, 1e-12);
        assert!((mass - 1.0).abs() < 1e-8);
        let mean = quad::integrate_semi_infinite(|x| x * dens(x), 0.0, 2.0 * pathloss, 1e-12);
        let d = MgDist::from_g2g(&sr, pathloss);
        assert!(((d.mean() - mean) / mean).abs() < 1e-6, "{} vs {mean}", d.mean());
        assert!(((mean - sr.mean_power() * pathloss) / mean).abs() < 1e-6);
    }

    #[test]
    fn g2g_raw_weights_sum_to_one() {
        // renormalization must not be what makes the mixture proper
        for m in 1..=8 {
            let sr = ShadowedRicianParams::new(m, 0.5f64, 1.0).unwrap();
            let rate = sr.beta() - sr.delta();
            let raw: f64 = (0..m as usize).map(|l| sr.alpha() * sr.zeta(l) / rate.powi(l as i32 + 1)).sum();
            assert!((raw - 1.0).abs() < 1e-12, "m={m}: {raw}");
        }
    }

    #[test]
    fn g2g_single_component_when_m_is_one() {
        let d = MgDist::from_g2g(&ShadowedRicianParams::new(1, 0.5f64, 1.0).unwrap(), 1.0);
        assert_eq!(d.components().len(), 1);
        assert_eq!(d.components()[0].mu, 1);
        assert!((d.mean() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn g2g_cdf_matches_lower_gamma_form() {
        for m in 1..=6 {
            let sr = ShadowedRicianParams::new(m, 0.4f64, 1.3).unwrap();
            let d = MgDist::from_g2g(&sr, 2e-7);
            for &x in &[1e-10, 1e-8, 1e-7, 5e-7, 3e-6] {
                let a = d.cdf(x).unwrap();
                let b = sr.power_cdf(2e-7, x);
                assert!((a - b).abs() < 1e-12, "m={m} x={x}: {a} vs {b}");
            }
        }
    }

    #[test]
    fn cdf_matches_integrated_pdf() {
        let d = g2g_reference();
        for &x in &[0.05, 0.3, 1.0, 2.5, 6.0] {
            let num = quad::integrate(|t| d.pdf(t).unwrap(), 0.0, x, 1e-13);
            assert!((num - d.cdf(x).unwrap()).abs() < 1e-8);
        }
    }

    #[test]
    fn pdf_nonnegative_for_all_mappings() {
        let link = A2GLinkParams { m: 3, eta_los_db: 1.6, eta_nlos_db: 23.0, carrier_freq: 3e9, p_los: 0.4 };
        let dists = [
            g2g_reference(),
            MgDist::from_a2g(&link, 10.0),
            MgDist::from_residual(&ResidualParams::new(0.1, 2.0).unwrap()).unwrap(),
        ];
        for d in &dists {
            let top = d.mean() * 20.0;
            for i in 0..1000 {
                assert!(d.pdf(top * i as f64 / 1000.0).unwrap() >= 0.0);
            }
            assert!((d.weight_sum() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn a2g_mapping() {
        let mut link = A2GLinkParams { m: 2, eta_los_db: 1.6f64, eta_nlos_db: 23.0, carrier_freq: 3e9, p_los: 1.0 };
        let d = MgDist::from_a2g(&link, 10.0);
        assert_eq!(d.components().len(), 1);
        assert_eq!(d.components()[0].mu, 2);
        link.p_los = 0.3;
        let d = MgDist::from_a2g(&link, 10.0);
        assert!((d.weight_sum() - 1.0).abs() < 1e-15);
        assert!(((d.mean() - link.mean_gain(10.0)) / d.mean()).abs() < 1e-12);
    }

    #[test]
    fn residual_mapping() {
        let r = ResidualParams::new(0.1f64, 2.0).unwrap();
        let d = MgDist::from_residual(&r).unwrap();
        assert!((d.mean() - 0.2).abs() < 1e-15);
        assert!((d.cdf(0.3).unwrap() - (1.0 - (-1.5f64).exp())).abs() < 1e-14);
        assert!(MgDist::from_residual(&ResidualParams::new(0.0, 2.0).unwrap()).is_none());
    }

    #[test]
    fn constructor_validation() {
        assert!(MgDist::new(vec![MgComponent::new(0.5, 1.0, 1)]).is_err());
        assert!(MgDist::new(vec![MgComponent::new(1.0, 0.0, 1)]).is_err());
        assert!(MgDist::new(vec![MgComponent::new(1.0, 1.0, 0)]).is_err());
        assert!(MgDist::<f64>::new(vec![]).is_err());
        assert!(MgDist::new(vec![MgComponent::new(0.5, 1.0, 1), MgComponent::new(0.5, 2.0, 3)]).is_ok());
    }

    #[test]
    fn upper_gamma_values() {
        for &x in &[0.0f64, 0.5, 3.0, 40.0] {
            assert!((upper_gamma_int(1, x).unwrap() - (-x).exp()).abs() < 1e-15);
        }
        assert!((upper_gamma_int(3, 0.0f64).unwrap() - 2.0).abs() < 1e-14);
        let num = quad::integrate_semi_infinite(|t| t.powi(3) * (-t).exp(), 2.0, 3.0, 1e-13);
        assert!((upper_gamma_int(4, 2.0f64).unwrap() - num).abs() < 1e-10);
        assert!((upper_gamma_int(4, 2.0f64).unwrap() - 6.0 * (-2.0f64).exp() * (1.0 + 2.0 + 2.0 + 4.0 / 3.0)).abs() < 1e-13);
        assert!(upper_gamma_int(0, 1.0f64).is_err());
        let far = upper_gamma_int(5, 700.0f64).unwrap();
        assert!(far.is_finite() && far > 0.0);
        let ln_expected = -700.0 + (700f64.powi(4) * (1.0 + 4.0 / 700.0 + 12.0 / 490_000.0 + 24.0 / 700f64.powi(3) + 24.0 / 700f64.powi(4))).ln();
        assert!((far.ln() - ln_expected).abs() < 1e-10);
    }

    #[test]
    fn lower_and_upper_are_complementary() {
        for n in 1..8 {
            for &x in &[1e-6, 0.1, 1.0, 4.0, 7.5, 30.0] {
                let s = regularized_lower_gamma::<f64>(n, x) + regularized_upper_gamma::<f64>(n, x);
                assert!((s - 1.0).abs() < 1e-13, "n={n} x={x}");
            }
        }
        // small-x lower tail keeps relative precision
        let p = regularized_lower_gamma::<f64>(3, 1e-5);
        assert!(((p - 1e-15 / 6.0) / p).abs() < 1e-4);
    }

    #[test]
    fn i0_examples() {
        let d = MgDist::exponential(1.5);
        assert_eq!(exceed_i0(&d, 0.0), 1.0);
        assert!((exceed_i0(&d, 1.5) - (-1.0f64).exp()).abs() < 1e-15);
        let link = A2GLinkParams { m: 3, eta_los_db: 1.6f64, eta_nlos_db: 23.0, carrier_freq: 3e9, p_los: 0.6 };
        let d = MgDist::from_a2g(&link, 10.0);
        // bisection on the CDF
        let (mut lo, mut hi) = (0.0, 1.0);
        while d.cdf(hi).unwrap() < 0.5 {
            hi *= 2.0;
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if d.cdf(mid).unwrap() < 0.5 { lo = mid } else { hi = mid }
        }
        assert!((exceed_i0(&d, 0.5 * (lo + hi)) - 0.5).abs() < 1e-8);
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let d = random_dist(&mut rng);
            let w = rng.gen_range(0.0..3.0);
            assert!((exceed_i0(&d, w) - (1.0 - d.cdf(w).unwrap())).abs() < 1e-10);
        }
    }

    #[test]
    fn i1_factorizes_without_coupling() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..10 {
            let (d0, d1) = (random_dist(&mut rng), random_dist(&mut rng));
            let (a, b) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let got = exceed_i1(&d0, &d1, &ExceedanceSpec::depth1(0.0, a, b)).unwrap();
            assert!((got - exceed_i0(&d0, a) * exceed_i0(&d1, b)).abs() < 1e-13);
        }
    }

    #[test]
    fn i1_symmetric_iid() {
        let d = MgDist::exponential(0.7f64);
        let got = exceed_i1(&d, &d, &ExceedanceSpec::depth1(1.0, 0.0, 0.0)).unwrap();
        assert!((got - 0.5).abs() < 1e-14);
        let q = quad::integrate_semi_infinite(|x| d.pdf(x).unwrap() * (-x / 0.7f64).exp(), 0.0, 0.7, 1e-13);
        assert!((q - 0.5).abs() < 1e-10);
    }

    #[test]
    fn i1_matches_quadrature() {
        let mut rng = ChaCha8Rng::seed_from_u64(33);
        for _ in 0..20 {
            let (d0, d1) = (random_dist(&mut rng), random_dist(&mut rng));
            let spec = ExceedanceSpec::depth1(rng.gen_range(0.0..2.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..1.0));
            let (t0, t1) = (triples(&d0), triples(&d1));
            let oracle = quad::integrate_semi_infinite(
                |x1| quad::mixture_pdf(&t1, x1) * quad::mixture_survival(&t0, spec.p[0] * x1 + spec.q[0], 1e-12),
                spec.w,
                2.0,
                1e-11,
            );
            let got = exceed_i1(&d0, &d1, &spec).unwrap();
            assert!((got - oracle).abs() < 1e-6, "{got} vs {oracle}");
        }
    }

    #[test]
    fn i2_factorizes_without_coupling() {
        let mut rng = ChaCha8Rng::seed_from_u64(34);
        for _ in 0..10 {
            let ds = [random_dist(&mut rng), random_dist(&mut rng), random_dist(&mut rng)];
            let (a, b, c) = (rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0));
            let got = exceed_i2(&ds[0], &ds[1], &ds[2], &ExceedanceSpec::depth2(0.0, a, 0.0, b, c)).unwrap();
            let expected = exceed_i0(&ds[0], a) * exceed_i0(&ds[1], b) * exceed_i0(&ds[2], c);
            assert!((got - expected).abs() < 1e-13);
        }
    }

    #[test]
    fn i2_vanishes_for_large_threshold() {
        let d = g2g_reference();
        let got = exceed_i2(&d, &d, &d, &ExceedanceSpec::depth2(0.5, 0.1, 0.5, 0.1, 500.0)).unwrap();
        assert!(got < 1e-100);
        let inf = exceed_i2(&d, &d, &d, &ExceedanceSpec::depth2(0.5, 0.1, 0.5, 0.1, f64::INFINITY)).unwrap();
        assert_eq!(inf, 0.0);
    }

    #[test]
    fn in_agrees_with_explicit_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(35);
        for _ in 0..25 {
            let ds = [random_dist(&mut rng), random_dist(&mut rng), random_dist(&mut rng)];
            let w = rng.gen_range(0.0..1.0);
            let s0 = ExceedanceSpec::depth0(w);
            assert!((exceed_in(&[&ds[0]], &s0).unwrap() - exceed_i0(&ds[0], w)).abs() < 1e-10);
            let s1 = ExceedanceSpec::depth1(rng.gen_range(0.0..2.0), rng.gen_range(0.0..1.0), w);
            let a = exceed_in(&[&ds[0], &ds[1]], &s1).unwrap();
            assert!((a - exceed_i1(&ds[0], &ds[1], &s1).unwrap()).abs() < 1e-10);
            let s2 = ExceedanceSpec::depth2(rng.gen_range(0.0..2.0), rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0), rng.gen_range(0.0..1.0), w);
            let b = exceed_in(&[&ds[0], &ds[1], &ds[2]], &s2).unwrap();
            assert!((b - exceed_i2(&ds[0], &ds[1], &ds[2], &s2).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn in_rejects_depth_mismatch() {
        let d = MgDist::exponential(1.0);
        let err = exceed_in(&[&d, &d], &ExceedanceSpec::depth0(1.0)).unwrap_err();
        assert_eq!(err, Error::DepthMismatch { dists: 2, links: 0 });
        assert!(exceed_i1(&d, &d, &ExceedanceSpec::depth0(1.0)).is_err());
        assert!(exceed_i1(&d, &d, &ExceedanceSpec::depth1(-1.0, 0.0, 0.0)).is_err());
    }

    #[test]
    fn exceedance_is_monotone_in_offsets() {
        let mut rng = ChaCha8Rng::seed_from_u64(36);
        for _ in 0..10 {
            let ds = [random_dist(&mut rng), random_dist(&mut rng), random_dist(&mut rng)];
            let base = ExceedanceSpec::depth2(0.7, 0.2, 0.4, 0.1, 0.3);
            let v = exceed_i2(&ds[0], &ds[1], &ds[2], &base).unwrap();
            for idx in 0..3 {
                let mut s = base.clone();
                match idx {
                    0 => s.q[0] += 0.2,
                    1 => s.q[1] += 0.2,
                    _ => s.w += 0.2,
                }
                assert!(exceed_i2(&ds[0], &ds[1], &ds[2], &s).unwrap() <= v + 1e-15);
            }
        }
    }

    #[test]
    fn f32_path_runs() {
        let d = MgDist::<f32>::exponential(1.0);
        let v = exceed_i1(&d, &d, &ExceedanceSpec::depth1(1.0f32, 0.0, 0.0)).unwrap();
        assert!((v - 0.5).abs() < 1e-5);
    }
}

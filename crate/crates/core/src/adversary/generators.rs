use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::aggregation::{geometric_median, krum, multi_krum, WeiszfeldConfig};
use crate::error::{Error, Result};
use crate::geometry::{approximation_ratio, enumerate_s_geo, min_covering_ball, ApproxRatio, CoveringBall};
use crate::instance::AgreementInstance;
use crate::params::SystemParams;
use crate::vector::Vector;

use super::{AdversarySpec, Behavior};

fn uniform_vector(rng: &mut ChaCha8Rng, d: usize) -> Vector {
    Vector::from_finite((0..d).map(|_| rng.random_range(-1.0..1.0)).collect())
}

/// Honest and Byzantine inputs drawn uniformly from `[-1, 1]^d`.
pub fn random_instance(params: SystemParams, adversary: AdversarySpec, seed: u64) -> Result<AgreementInstance> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let honest = (0..params.honest()).map(|_| uniform_vector(&mut rng, params.d)).collect();
    let byzantine = (0..params.f).map(|_| uniform_vector(&mut rng, params.d)).collect();
    AgreementInstance::new(params, honest, adversary, seed)?.with_byzantine_inputs(byzantine)
}

/// Two honest clusters at `v1` and `v2` with the oscillation adversary.
///
/// Honest nodes `0..h/2` start at `v1`, the rest at `v2`. Half of the
/// Byzantine nodes echo the first cluster to it, the other half the second.
pub fn make_md_oscillation_instance(params: SystemParams, v1: Vector, v2: Vector) -> Result<AgreementInstance> {
    if params.f != params.t {
        return Err(Error::InvalidParams(format!(
            "oscillation needs f = t (f = {}, t = {})",
            params.f, params.t
        )));
    }
    if params.quorum() % 2 != 0 || params.t % 2 != 0 {
        return Err(Error::InvalidParams(format!(
            "oscillation needs n − t and t even (n = {}, t = {})",
            params.n, params.t
        )));
    }
    v1.ensure_dim(params.d)?;
    v2.ensure_dim(params.d)?;
    let h = params.honest();
    let honest = (0..h).map(|i| if i < h / 2 { v1.clone() } else { v2.clone() }).collect();
    let byzantine = (0..params.f)
        .map(|k| if k < params.f / 2 { v1.clone() } else { v2.clone() })
        .collect();
    let adversary = AdversarySpec::new(Behavior::MdOscillation, params.f)?;
    AgreementInstance::new(params, honest, adversary, 0)?.with_byzantine_inputs(byzantine)
}

/// A server-side instance where only `n − t` honest vectors arrive.
#[derive(Debug, Clone, PartialEq)]
pub struct KrumUnboundedInstance {
    pub params: SystemParams,
    pub received: Vec<Vector>,
    pub geo_median: Vector,
    pub ball: CoveringBall,
    pub krum_output: Vector,
    /// Multi-Krum with `q = min(3, n − t)`.
    pub multi_krum_output: Vector,
    pub krum_ratio: ApproxRatio,
    pub multi_krum_ratio: ApproxRatio,
    /// Seed of the accepted draw.
    pub seed: u64,
}

const KRUM_GAP: f64 = 1e-3;
const KRUM_ATTEMPTS: u64 = 1000;

/// Searches seeds `seed, seed + 1, …` for `n − t` points in `[0, 1]^d` whose
/// Krum and Multi-Krum outputs both lie more than `1e-3` from their
/// geometric median.
pub fn make_krum_unbounded_instance(params: SystemParams, seed: u64) -> Result<KrumUnboundedInstance> {
    let q = params.quorum();
    if q < 3 {
        return Err(Error::InvalidParams(format!("need n − t >= 3, got {q}")));
    }
    let cfg = WeiszfeldConfig::default();
    for attempt in 0..KRUM_ATTEMPTS {
        let s = seed.wrapping_add(attempt);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let received: Vec<Vector> = (0..q)
            .map(|_| Vector::from_finite((0..params.d).map(|_| rng.random::<f64>()).collect()))
            .collect();
        if let Some(inst) = certify_krum_instance(params, received, &cfg)? {
            return Ok(KrumUnboundedInstance { seed: s, ..inst });
        }
    }
    Err(Error::InvalidParams(format!(
        "no instance with a Krum gap above {KRUM_GAP} in {KRUM_ATTEMPTS} draws"
    )))
}

fn certify_krum_instance(
    params: SystemParams,
    received: Vec<Vector>,
    cfg: &WeiszfeldConfig,
) -> Result<Option<KrumUnboundedInstance>> {
    let geo_median = geometric_median(&received, cfg)?;
    let krum_output = krum(&received, &params)?;
    let multi_krum_output = multi_krum(&received, &params, params.quorum().min(3))?;
    if krum_output.dist(&geo_median) <= KRUM_GAP || multi_krum_output.dist(&geo_median) <= KRUM_GAP {
        return Ok(None);
    }
    let s_geo = enumerate_s_geo(&received, &params, cfg)?;
    let ball = min_covering_ball(&s_geo.medians)?;
    Ok(Some(KrumUnboundedInstance {
        params,
        krum_ratio: approximation_ratio(&krum_output, &geo_median, &ball),
        multi_krum_ratio: approximation_ratio(&multi_krum_output, &geo_median, &ball),
        received,
        geo_median,
        ball,
        krum_output,
        multi_krum_output,
        seed: 0,
    }))
}

/// The labeled construction against the safe-area rule.
#[derive(Debug, Clone, PartialEq)]
pub struct SafeAreaInstance {
    pub params: SystemParams,
    pub honest_inputs: Vec<Vector>,
    pub byzantine_inputs: Vec<Vector>,
    /// The single point the safe-area rule can output.
    pub safe_area: Vector,
    /// Geometric median of the honest inputs.
    pub true_median: Vector,
    /// Covering ball of the subset medians of all `n` vectors.
    pub ball: CoveringBall,
    pub ratio: ApproxRatio,
}

/// One honest node and all `f` Byzantine nodes at the origin, and `d` groups
/// of `f` honest nodes at `x·e₁ + eps·e_j`. Requires `n = d·f + 1 + f`,
/// `t = f` and `d >= 3`.
///
/// With `eps = 0` the analytic values are exact: ratio 4 for `d = 3` and an
/// unbounded ratio for `d >= 4`. A positive `eps` separates the groups and
/// yields a finite ratio that grows as `eps` shrinks.
pub fn make_safearea_instance(params: SystemParams, x: f64, eps: f64) -> Result<SafeAreaInstance> {
    let SystemParams { n, t, f, d } = params;
    if d < 3 || f == 0 || t != f || n != d * f + 1 + f {
        return Err(Error::InvalidParams(format!(
            "safe-area construction needs d >= 3, t = f >= 1 and n = d·f + 1 + f (n = {n}, t = {t}, f = {f}, d = {d})"
        )));
    }
    if !x.is_finite() || !eps.is_finite() {
        return Err(Error::InvalidParams("x and eps must be finite".into()));
    }
    let origin = Vector::zeros(d);
    let mut honest = vec![origin.clone()];
    for j in 0..d {
        let mut c = vec![0.0; d];
        c[0] = x;
        c[j] += eps;
        let p = Vector::new(c)?;
        honest.extend(std::iter::repeat_n(p, f));
    }
    let byzantine = vec![origin.clone(); f];
    let cfg = WeiszfeldConfig::default();
    let true_median = geometric_median(&honest, &cfg)?;
    let mut all = honest.clone();
    all.extend(byzantine.iter().cloned());
    let s_geo = enumerate_s_geo(&all, &params, &cfg)?;
    let ball = min_covering_ball(&s_geo.medians)?;
    let ratio = approximation_ratio(&origin, &true_median, &ball);
    Ok(SafeAreaInstance {
        params,
        honest_inputs: honest,
        byzantine_inputs: byzantine,
        safe_area: origin,
        true_median,
        ball,
        ratio,
    })
}

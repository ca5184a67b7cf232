use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::sync::{Arc, LazyLock, RwLock};

use crate::error::{Error, Result};
use crate::rng::RandomSource;

/// Version tag for the built-in generator algorithms and the RNG behind
/// them, stored in dataset metadata. Bump on any change that alters the
/// values a given (config, seed) pair produces.
pub const GENERATOR_CATALOG_VERSION: &str = "1-chacha8";

/// Generator parameters by name. All parameter values are floats; callers
/// hand integers in as their float value.
pub type Params = BTreeMap<String, f64>;

/// Whether a generator is meant to serve as background signal or as a
/// localized feature. Advisory only: any generator works in either role.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RoleHint {
    Signal,
    Feature,
    Either,
}

/// A generator kind plus its parameters, before registry resolution.
#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub kind: String,
    pub params: Params,
}

impl GeneratorSpec {
    pub fn new(kind: impl Into<String>) -> Self {
        Self {
            kind: kind.into(),
            params: Params::new(),
        }
    }

    /// Adds or replaces one parameter.
    pub fn with(mut self, name: impl Into<String>, value: f64) -> Self {
        self.params.insert(name.into(), value);
        self
    }
}

/// White noise drawn from N(0, sigma^2).
pub fn gaussian_noise(sigma: f64) -> GeneratorSpec {
    GeneratorSpec::new("gaussian_noise").with("sigma", sigma)
}

/// White noise drawn from Uniform[low, high).
pub fn uniform_noise(low: f64, high: f64) -> GeneratorSpec {
    GeneratorSpec::new("uniform_noise").with("low", low).with("high", high)
}

/// AR(1) noise x_t = phi * x_{t-1} + N(0, sigma^2), x_0 drawn from the
/// innovation distribution. phi defaults to 0.9; override with
/// `.with("phi", ...)`.
pub fn red_noise(sigma: f64) -> GeneratorSpec {
    GeneratorSpec::new("red_noise").with("sigma", sigma)
}

/// Cumulative sum of N(0, step_sigma^2) steps.
pub fn random_walk(step_sigma: f64) -> GeneratorSpec {
    GeneratorSpec::new("random_walk").with("step_sigma", step_sigma)
}

/// Sinusoid amplitude * sin(2*pi*t/period + phase). phase defaults to 0.
pub fn seasonal(period: f64, amplitude: f64) -> GeneratorSpec {
    GeneratorSpec::new("seasonal")
        .with("period", period)
        .with("amplitude", amplitude)
}

/// Line intercept + slope * t. intercept defaults to 0.
pub fn trend(slope: f64) -> GeneratorSpec {
    GeneratorSpec::new("trend").with("slope", slope)
}

/// Symmetric triangle rising from 0 to amplitude at the midpoint index
/// (length - 1) / 2 rounded down, then back to 0 at the last index.
pub fn peak(amplitude: f64) -> GeneratorSpec {
    GeneratorSpec::new("peak").with("amplitude", amplitude)
}

/// Negated [`peak`].
pub fn trough(amplitude: f64) -> GeneratorSpec {
    GeneratorSpec::new("trough").with("amplitude", amplitude)
}

/// Gaussian bump centered mid-window with standard deviation
/// width_fraction * length. width_fraction defaults to 1/6.
pub fn gaussian_pulse(amplitude: f64) -> GeneratorSpec {
    GeneratorSpec::new("gaussian_pulse").with("amplitude", amplitude)
}

type GenFn = dyn Fn(usize, &mut RandomSource, &Params) -> Result<Vec<f64>> + Send + Sync;
type CheckFn = dyn Fn(&Params) -> Result<()> + Send + Sync;

#[derive(Clone)]
struct Entry {
    func: Arc<GenFn>,
    required: Vec<String>,
    defaults: Params,
    check: Option<Arc<CheckFn>>,
    role_hint: RoleHint,
}

/// Name-keyed table of generator implementations.
///
/// A fresh registry starts with the nine built-ins; custom generators can be
/// added under new names at runtime. Most code talks to the process-wide
/// instance via [`global_registry`] or [`register_generator`].
#[derive(Clone)]
pub struct GeneratorRegistry {
    entries: BTreeMap<String, Entry>,
}

impl GeneratorRegistry {
    /// A registry holding only the built-in generators.
    pub fn with_builtins() -> Self {
        let mut r = Self {
            entries: BTreeMap::new(),
        };
        install_builtins(&mut r);
        r
    }

    /// A registry with no generators at all.
    pub fn empty() -> Self {
        Self {
            entries: BTreeMap::new(),
        }
    }

    pub fn contains(&self, name: &str) -> bool {
        self.entries.contains_key(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn role_hint(&self, name: &str) -> Option<RoleHint> {
        self.entries.get(name).map(|e| e.role_hint)
    }

    /// Closest registered name within edit distance 2, for typo hints.
    pub fn suggest(&self, kind: &str) -> Option<String> {
        nearest_name(kind, self.entries.keys())
    }

    /// Registers a custom generator. The function must return exactly
    /// `length` finite values. Errors if the name is already taken; use
    /// [`GeneratorRegistry::register_overwriting`] to replace.
    pub fn register<F>(
        &mut self,
        name: &str,
        required_params: &[&str],
        role_hint: RoleHint,
        func: F,
    ) -> Result<()>
    where
        F: Fn(usize, &mut RandomSource, &Params) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        if self.entries.contains_key(name) {
            return Err(Error::DuplicateGenerator(name.to_string()));
        }
        self.register_overwriting(name, required_params, role_hint, func)
    }

    /// Registers a custom generator, replacing any existing one of the
    /// same name.
    pub fn register_overwriting<F>(
        &mut self,
        name: &str,
        required_params: &[&str],
        role_hint: RoleHint,
        func: F,
    ) -> Result<()>
    where
        F: Fn(usize, &mut RandomSource, &Params) -> Result<Vec<f64>> + Send + Sync + 'static,
    {
        if name.is_empty() {
            return Err(Error::Config("generator name must be non-empty".into()));
        }
        self.entries.insert(
            name.to_string(),
            Entry {
                func: Arc::new(func),
                required: required_params.iter().map(|s| s.to_string()).collect(),
                defaults: Params::new(),
                check: None,
                role_hint,
            },
        );
        Ok(())
    }

    /// The parameter names a generator accepts: (required, optional).
    pub fn param_names(&self, kind: &str) -> Option<(Vec<String>, Vec<String>)> {
        self.entries.get(kind).map(|e| {
            (
                e.required.clone(),
                e.defaults.keys().cloned().collect::<Vec<_>>(),
            )
        })
    }

    /// Checks a spec against the registry: the kind must exist, required
    /// parameters must be present, no unknown parameters, and every value
    /// must lie in its domain. Returns the generator bound to its full
    /// parameter set with defaults filled in.
    pub fn resolve(&self, spec: &GeneratorSpec) -> Result<BoundGenerator> {
        let entry = self.entries.get(&spec.kind).ok_or_else(|| {
            Error::UnknownGenerator {
                kind: spec.kind.clone(),
                suggestion: nearest_name(&spec.kind, self.entries.keys()),
            }
        })?;
        for name in spec.params.keys() {
            if !entry.required.iter().any(|r| r == name) && !entry.defaults.contains_key(name) {
                return Err(Error::InvalidParam {
                    kind: spec.kind.clone(),
                    name: name.clone(),
                    reason: "not a parameter of this generator".into(),
                });
            }
        }
        for name in &entry.required {
            if !spec.params.contains_key(name) {
                return Err(Error::MissingParam {
                    kind: spec.kind.clone(),
                    name: name.clone(),
                });
            }
        }
        let mut params = entry.defaults.clone();
        params.extend(spec.params.iter().map(|(k, v)| (k.clone(), *v)));
        for (name, value) in &params {
            if !value.is_finite() {
                return Err(Error::InvalidParam {
                    kind: spec.kind.clone(),
                    name: name.clone(),
                    reason: "must be finite".into(),
                });
            }
        }
        if let Some(check) = &entry.check {
            check(&params)?;
        }
        Ok(BoundGenerator {
            kind: spec.kind.clone(),
            func: entry.func.clone(),
            params,
        })
    }
}

/// A resolved generator: implementation plus validated parameters.
#[derive(Clone)]
pub struct BoundGenerator {
    kind: String,
    func: Arc<GenFn>,
    params: Params,
}

impl std::fmt::Debug for BoundGenerator {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("BoundGenerator")
            .field("kind", &self.kind)
            .field("params", &self.params)
            .finish_non_exhaustive()
    }
}

impl BoundGenerator {
    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    /// Produces `length` values, drawing any randomness from `rng`.
    /// The output is checked: exactly `length` values, all finite.
    pub fn generate(&self, length: usize, rng: &mut RandomSource) -> Result<Vec<f64>> {
        if length == 0 {
            return Err(Error::InvalidParam {
                kind: self.kind.clone(),
                name: "length".into(),
                reason: "must be at least 1".into(),
            });
        }
        let out = (self.func)(length, rng, &self.params)?;
        if out.len() != length {
            return Err(Error::GeneratorContract {
                kind: self.kind.clone(),
                reason: format!("returned {} values for length {}", out.len(), length),
            });
        }
        if out.iter().any(|v| !v.is_finite()) {
            return Err(Error::GeneratorContract {
                kind: self.kind.clone(),
                reason: "returned a non-finite value".into(),
            });
        }
        Ok(out)
    }
}

static GLOBAL: LazyLock<RwLock<GeneratorRegistry>> =
    LazyLock::new(|| RwLock::new(GeneratorRegistry::with_builtins()));

/// The process-wide registry. Builds use it unless handed an explicit
/// instance.
pub fn global_registry() -> &'static RwLock<GeneratorRegistry> {
    &GLOBAL
}

/// Registers a custom generator in the process-wide registry.
pub fn register_generator<F>(
    name: &str,
    required_params: &[&str],
    role_hint: RoleHint,
    func: F,
) -> Result<()>
where
    F: Fn(usize, &mut RandomSource, &Params) -> Result<Vec<f64>> + Send + Sync + 'static,
{
    GLOBAL
        .write()
        .expect("generator registry lock poisoned")
        .register(name, required_params, role_hint, func)
}

/// Closest registered name within edit distance 2, for typo hints.
fn nearest_name<'a>(
    kind: &str,
    names: impl Iterator<Item = &'a String>,
) -> Option<String> {
    names
        .map(|n| (edit_distance(kind, n), n))
        .filter(|(d, _)| *d <= 2)
        .min_by_key(|(d, _)| *d)
        .map(|(_, n)| n.clone())
}

fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = vec![0; b.len() + 1];
    for i in 1..=a.len() {
        cur[0] = i;
        for j in 1..=b.len() {
            let sub = prev[j - 1] + usize::from(a[i - 1] != b[j - 1]);
            cur[j] = sub.min(prev[j] + 1).min(cur[j - 1] + 1);
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn param(params: &Params, name: &str) -> f64 {
    params[name]
}

fn invalid(kind: &str, name: &str, reason: &str) -> Error {
    Error::InvalidParam {
        kind: kind.into(),
        name: name.into(),
        reason: reason.into(),
    }
}

fn install_builtins(r: &mut GeneratorRegistry) {
    let mut add = |name: &str,
                   required: &[&str],
                   defaults: &[(&str, f64)],
                   role_hint: RoleHint,
                   check: Option<Arc<CheckFn>>,
                   func: Arc<GenFn>| {
        r.entries.insert(
            name.to_string(),
            Entry {
                func,
                required: required.iter().map(|s| s.to_string()).collect(),
                defaults: defaults
                    .iter()
                    .map(|(k, v)| (k.to_string(), *v))
                    .collect(),
                check,
                role_hint,
            },
        );
    };

    add(
        "gaussian_noise",
        &["sigma"],
        &[],
        RoleHint::Signal,
        Some(Arc::new(|p: &Params| {
            if param(p, "sigma") <= 0.0 {
                return Err(invalid("gaussian_noise", "sigma", "must be > 0"));
            }
            Ok(())
        })),
        Arc::new(|length, rng, p| {
            let sigma = param(p, "sigma");
            Ok((0..length).map(|_| rng.normal(sigma)).collect())
        }),
    );

    add(
        "uniform_noise",
        &["low", "high"],
        &[],
        RoleHint::Signal,
        Some(Arc::new(|p: &Params| {
            if param(p, "low") >= param(p, "high") {
                return Err(invalid("uniform_noise", "low", "must be < high"));
            }
            Ok(())
        })),
        Arc::new(|length, rng, p| {
            let (low, high) = (param(p, "low"), param(p, "high"));
            Ok((0..length).map(|_| rng.uniform(low, high)).collect())
        }),
    );

    add(
        "red_noise",
        &["sigma"],
        &[("phi", 0.9)],
        RoleHint::Signal,
        Some(Arc::new(|p: &Params| {
            if param(p, "sigma") <= 0.0 {
                return Err(invalid("red_noise", "sigma", "must be > 0"));
            }
            let phi = param(p, "phi");
            if phi <= -1.0 || phi >= 1.0 {
                return Err(invalid("red_noise", "phi", "must lie in (-1, 1)"));
            }
            Ok(())
        })),
        Arc::new(|length, rng, p| {
            let (sigma, phi) = (param(p, "sigma"), param(p, "phi"));
            let mut out = Vec::with_capacity(length);
            let mut prev = rng.normal(sigma);
            out.push(prev);
            for _ in 1..length {
                prev = phi * prev + rng.normal(sigma);
                out.push(prev);
            }
            Ok(out)
        }),
    );

    add(
        "random_walk",
        &["step_sigma"],
        &[],
        RoleHint::Signal,
        Some(Arc::new(|p: &Params| {
            if param(p, "step_sigma") <= 0.0 {
                return Err(invalid("random_walk", "step_sigma", "must be > 0"));
            }
            Ok(())
        })),
        Arc::new(|length, rng, p| {
            let sigma = param(p, "step_sigma");
            let mut sum = 0.0;
            Ok((0..length)
                .map(|_| {
                    sum += rng.normal(sigma);
                    sum
                })
                .collect())
        }),
    );

    add(
        "seasonal",
        &["period", "amplitude"],
        &[("phase", 0.0)],
        RoleHint::Signal,
        Some(Arc::new(|p: &Params| {
            if param(p, "period") <= 0.0 {
                return Err(invalid("seasonal", "period", "must be > 0"));
            }
            Ok(())
        })),
        Arc::new(|length, _rng, p| {
            let (period, amplitude, phase) =
                (param(p, "period"), param(p, "amplitude"), param(p, "phase"));
            Ok((0..length)
                .map(|t| amplitude * (TAU * t as f64 / period + phase).sin())
                .collect())
        }),
    );

    add(
        "trend",
        &["slope"],
        &[("intercept", 0.0)],
        RoleHint::Signal,
        None,
        Arc::new(|length, _rng, p| {
            let (slope, intercept) = (param(p, "slope"), param(p, "intercept"));
            Ok((0..length).map(|t| intercept + slope * t as f64).collect())
        }),
    );

    add(
        "peak",
        &["amplitude"],
        &[],
        RoleHint::Feature,
        None,
        Arc::new(|length, _rng, p| Ok(triangle(length, param(p, "amplitude")))),
    );

    add(
        "trough",
        &["amplitude"],
        &[],
        RoleHint::Feature,
        None,
        Arc::new(|length, _rng, p| {
            Ok(triangle(length, param(p, "amplitude"))
                .into_iter()
                .map(|v| -v)
                .collect())
        }),
    );

    add(
        "gaussian_pulse",
        &["amplitude"],
        &[("width_fraction", 1.0 / 6.0)],
        RoleHint::Feature,
        Some(Arc::new(|p: &Params| {
            let wf = param(p, "width_fraction");
            if wf <= 0.0 || wf > 1.0 {
                return Err(invalid(
                    "gaussian_pulse",
                    "width_fraction",
                    "must lie in (0, 1]",
                ));
            }
            Ok(())
        })),
        Arc::new(|length, _rng, p| {
            let (amplitude, wf) = (param(p, "amplitude"), param(p, "width_fraction"));
            let center = (length as f64 - 1.0) / 2.0;
            let sigma = wf * length as f64;
            Ok((0..length)
                .map(|t| {
                    let d = t as f64 - center;
                    amplitude * (-d * d / (2.0 * sigma * sigma)).exp()
                })
                .collect())
        }),
    );
}

/// Triangle rising linearly to `amplitude` at index (length - 1) / 2
/// (integer division), then falling linearly back to 0.
fn triangle(length: usize, amplitude: f64) -> Vec<f64> {
    if length == 1 {
        return vec![amplitude];
    }
    let mid = (length - 1) / 2;
    let last = length - 1;
    (0..length)
        .map(|t| {
            if t <= mid {
                if mid == 0 {
                    amplitude
                } else {
                    amplitude * t as f64 / mid as f64
                }
            } else {
                amplitude * (last - t) as f64 / (last - mid) as f64
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gen(spec: &GeneratorSpec, length: usize, seed: u64) -> Vec<f64> {
        let reg = GeneratorRegistry::with_builtins();
        let bound = reg.resolve(spec).unwrap();
        let mut rng = RandomSource::from_seed(seed);
        bound.generate(length, &mut rng).unwrap()
    }

    fn assert_close(actual: &[f64], expected: &[f64], tol: f64) {
        assert_eq!(actual.len(), expected.len());
        for (i, (a, e)) in actual.iter().zip(expected).enumerate() {
            assert!(
                (a - e).abs() <= tol,
                "index {i}: got {a}, expected {e}"
            );
        }
    }

    #[test]
    fn peak_matches_hand_values() {
        assert_close(&gen(&peak(1.0), 5, 0), &[0.0, 0.5, 1.0, 0.5, 0.0], 0.0);
        assert_close(&gen(&peak(2.0), 4, 0), &[0.0, 2.0, 1.0, 0.0], 0.0);
        assert_close(&gen(&peak(1.0), 2, 0), &[1.0, 0.0], 0.0);
        assert_close(&gen(&peak(3.0), 1, 0), &[3.0], 0.0);
    }

    #[test]
    fn trough_is_negated_peak() {
        let up = gen(&peak(2.5), 9, 0);
        let down = gen(&trough(2.5), 9, 0);
        for (u, d) in up.iter().zip(&down) {
            assert_eq!(*d, -*u);
        }
    }

    #[test]
    fn seasonal_matches_hand_values() {
        // period 4 samples sin at multiples of pi/2
        assert_close(
            &gen(&seasonal(4.0, 1.0), 4, 0),
            &[0.0, 1.0, 0.0, -1.0],
            1e-12,
        );
        // phase pi/2 turns sin into cos
        let shifted = gen(
            &seasonal(4.0, 2.0).with("phase", std::f64::consts::FRAC_PI_2),
            4,
            0,
        );
        assert_close(&shifted, &[2.0, 0.0, -2.0, 0.0], 1e-12);
    }

    #[test]
    fn trend_matches_hand_values() {
        let line = gen(&trend(-0.5).with("intercept", 2.0), 3, 0);
        assert_close(&line, &[2.0, 1.5, 1.0], 0.0);
        // intercept defaults to 0
        assert_close(&gen(&trend(1.0), 3, 0), &[0.0, 1.0, 2.0], 0.0);
    }

    #[test]
    fn gaussian_pulse_matches_hand_values() {
        // length 5, default width_fraction 1/6: sigma = 5/6, center = 2,
        // exponent at |t - 2| = 1 is 1 / (2 * 25/36) = 0.72
        let pulse = gen(&gaussian_pulse(1.0), 5, 0);
        let off = (-0.72f64).exp();
        assert_close(&pulse, &[(-2.88f64).exp(), off, 1.0, off, (-2.88f64).exp()], 1e-15);
        assert_eq!(pulse[2], 1.0);
        // symmetric for even lengths too
        let even = gen(&gaussian_pulse(3.0), 6, 0);
        for t in 0..3 {
            assert_eq!(even[t], even[5 - t]);
        }
    }

    #[test]
    fn noise_generators_are_deterministic_per_seed() {
        for spec in [
            gaussian_noise(1.5),
            uniform_noise(-1.0, 1.0),
            red_noise(1.0),
            random_walk(0.5),
        ] {
            let a = gen(&spec, 64, 42);
            let b = gen(&spec, 64, 42);
            assert_eq!(a, b, "{} not reproducible", spec.kind);
            let c = gen(&spec, 64, 43);
            assert_ne!(a, c, "{} ignores the seed", spec.kind);
        }
    }

    #[test]
    fn uniform_noise_respects_bounds() {
        let vals = gen(&uniform_noise(2.0, 3.0), 10_000, 1);
        assert!(vals.iter().all(|&v| (2.0..3.0).contains(&v)));
    }

    #[test]
    fn random_walk_is_cumsum_of_normal_steps() {
        let walk = gen(&random_walk(0.7), 100, 5);
        let mut rng = RandomSource::from_seed(5);
        let mut sum = 0.0;
        for v in &walk {
            sum += rng.normal(0.7);
            assert_eq!(*v, sum);
        }
    }

    #[test]
    fn red_noise_follows_recurrence() {
        let series = gen(&red_noise(1.0).with("phi", 0.5), 50, 8);
        let mut rng = RandomSource::from_seed(8);
        let mut prev = rng.normal(1.0);
        assert_eq!(series[0], prev);
        for v in &series[1..] {
            prev = 0.5 * prev + rng.normal(1.0);
            assert_eq!(*v, prev);
        }
    }

    #[test]
    fn out_of_domain_params_rejected() {
        let reg = GeneratorRegistry::with_builtins();
        for spec in [
            gaussian_noise(0.0),
            gaussian_noise(-1.0),
            uniform_noise(1.0, 1.0),
            uniform_noise(2.0, -2.0),
            red_noise(1.0).with("phi", 1.0),
            red_noise(0.0),
            random_walk(0.0),
            seasonal(0.0, 1.0),
            gaussian_pulse(1.0).with("width_fraction", 0.0),
            gaussian_pulse(1.0).with("width_fraction", 1.5),
            gaussian_noise(f64::NAN),
        ] {
            let err = reg.resolve(&spec).unwrap_err();
            assert!(
                matches!(err, Error::InvalidParam { .. }),
                "{spec:?} gave {err}"
            );
        }
    }

    #[test]
    fn unknown_and_missing_params_rejected() {
        let reg = GeneratorRegistry::with_builtins();
        let err = reg
            .resolve(&gaussian_noise(1.0).with("sgima", 2.0))
            .unwrap_err();
        assert!(matches!(err, Error::InvalidParam { .. }), "got {err}");

        let err = reg.resolve(&GeneratorSpec::new("seasonal")).unwrap_err();
        assert!(matches!(err, Error::MissingParam { .. }), "got {err}");
    }

    #[test]
    fn unknown_kind_suggests_nearest_name() {
        let reg = GeneratorRegistry::with_builtins();
        let err = reg
            .resolve(&GeneratorSpec::new("gausian_noise").with("sigma", 1.0))
            .unwrap_err();
        assert_eq!(
            err.to_string(),
            "unknown generator `gausian_noise`; did you mean `gaussian_noise`?"
        );
        let err = reg
            .resolve(&GeneratorSpec::new("walrus_operator"))
            .unwrap_err();
        assert!(matches!(
            err,
            Error::UnknownGenerator {
                suggestion: None,
                ..
            }
        ));
    }

    #[test]
    fn defaults_fill_in() {
        let reg = GeneratorRegistry::with_builtins();
        let bound = reg.resolve(&red_noise(1.0)).unwrap();
        assert_eq!(bound.params()["phi"], 0.9);
        let bound = reg.resolve(&gaussian_pulse(1.0)).unwrap();
        assert_eq!(bound.params()["width_fraction"], 1.0 / 6.0);
    }

    #[test]
    fn custom_generator_registers_and_runs() {
        let mut reg = GeneratorRegistry::with_builtins();
        reg.register("constant", &["value"], RoleHint::Either, |length, _rng, p: &Params| {
            Ok(vec![p["value"]; length])
        })
        .unwrap();
        let bound = reg
            .resolve(&GeneratorSpec::new("constant").with("value", 4.0))
            .unwrap();
        let mut rng = RandomSource::from_seed(0);
        assert_eq!(bound.generate(3, &mut rng).unwrap(), vec![4.0, 4.0, 4.0]);

        let err = reg
            .register("constant", &["value"], RoleHint::Either, |_l, _r, _p: &Params| Ok(vec![]))
            .unwrap_err();
        assert!(matches!(err, Error::DuplicateGenerator(_)));

        reg.register_overwriting("constant", &[], RoleHint::Either, |length, _r, _p: &Params| {
            Ok(vec![0.0; length])
        })
        .unwrap();
        let bound = reg.resolve(&GeneratorSpec::new("constant")).unwrap();
        assert_eq!(bound.generate(2, &mut rng).unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn contract_violations_caught() {
        let mut reg = GeneratorRegistry::empty();
        reg.register("short", &[], RoleHint::Either, |length, _r, _p: &Params| {
            Ok(vec![0.0; length.saturating_sub(1)])
        })
        .unwrap();
        reg.register("nan", &[], RoleHint::Either, |length, _r, _p: &Params| {
            Ok(vec![f64::NAN; length])
        })
        .unwrap();
        let mut rng = RandomSource::from_seed(0);
        let err = reg
            .resolve(&GeneratorSpec::new("short"))
            .unwrap()
            .generate(4, &mut rng)
            .unwrap_err();
        assert!(matches!(err, Error::GeneratorContract { .. }));
        let err = reg
            .resolve(&GeneratorSpec::new("nan"))
            .unwrap()
            .generate(4, &mut rng)
            .unwrap_err();
        assert!(matches!(err, Error::GeneratorContract { .. }));
    }

    #[test]
    fn zero_length_rejected() {
        let reg = GeneratorRegistry::with_builtins();
        let bound = reg.resolve(&peak(1.0)).unwrap();
        let mut rng = RandomSource::from_seed(0);
        let err = bound.generate(0, &mut rng).unwrap_err();
        assert!(matches!(err, Error::InvalidParam { .. }));
    }

    #[test]
    fn role_hints_recorded() {
        let reg = GeneratorRegistry::with_builtins();
        assert_eq!(reg.role_hint("gaussian_noise"), Some(RoleHint::Signal));
        assert_eq!(reg.role_hint("gaussian_pulse"), Some(RoleHint::Feature));
        assert_eq!(reg.role_hint("nope"), None);
    }

    #[test]
    fn global_registry_accepts_custom_generators() {
        register_generator("test_only_ramp", &[], RoleHint::Either, |length, _r, _p| {
            Ok((0..length).map(|t| t as f64).collect())
        })
        .unwrap();
        let reg = global_registry().read().unwrap();
        assert!(reg.contains("test_only_ramp"));
        assert!(reg.contains("gaussian_noise"));
    }

    #[test]
    fn edit_distance_basics() {
        assert_eq!(edit_distance("peak", "peak"), 0);
        assert_eq!(edit_distance("paek", "peak"), 2);
        assert_eq!(edit_distance("", "abc"), 3);
        assert_eq!(edit_distance("kitten", "sitting"), 3);
    }
}

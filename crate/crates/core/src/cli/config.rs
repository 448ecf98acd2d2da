//! Flat `key = value` experiment configuration.
//!
//! A config file holds one `key = value` pair per line; `#` starts a
//! comment. Values from `--set key=value` are applied after the file. Keys
//! that are not set take their defaults, some of which depend on other keys
//! (`criterion.delta_prime = δ`, `criterion.epsilon = δ/100`). The effective
//! config always lists every key, so it can be saved and replayed verbatim.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use crate::adaptive::{StoppingCriterion, Strategy};
use crate::dictionary::{Dictionary, WeightFn};
use crate::domain::Domain;
use crate::function::Function;
use crate::sampling::{OversamplingRule, PointKind};

/// Where a raw value came from, for error messages.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Source {
    Line(usize),
    Override(String),
    Preset,
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Line(n) => write!(f, "line {n}"),
            Self::Override(s) => write!(f, "--set {s}"),
            Self::Preset => write!(f, "preset"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConfigError {
    pub source: Option<Source>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.source {
            Some(s) => write!(f, "{s}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

type ConfigResult<T> = std::result::Result<T, ConfigError>;

fn err<T>(source: Option<Source>, message: impl Into<String>) -> ConfigResult<T> {
    Err(ConfigError { source, message: message.into() })
}

/// Every recognized key with its default; `None` marks derived or required keys.
pub const KEYS: &[(&str, Option<&str>)] = &[
    ("approximate.n", None),
    ("criterion.delta", Some("1e-10")),
    ("criterion.delta_prime", None),
    ("criterion.epsilon", None),
    ("criterion.mu", Some("none")),
    ("criterion.n_max", Some("4096")),
    ("criterion.q", Some("3")),
    ("criterion.seed", Some("0")),
    ("dictionary.kind", Some("fourier")),
    ("dictionary.support", Some("-2,2")),
    ("dictionary.weighted_copy", Some("none")),
    ("domain.bounds", Some("-1,1")),
    ("domain.center", Some("0,0")),
    ("domain.kind", Some("interval")),
    ("domain.radius", Some("0.9")),
    ("family.p_values", Some("50,100,150,200,250,300,350,400,450,500")),
    ("function.name", Some("exp")),
    ("function.p", Some("1")),
    ("function.scale", Some("1")),
    ("function.sigma", Some("0")),
    ("function.value", Some("1")),
    ("grid.axis1", Some("criterion.epsilon")),
    ("grid.axis1_values", Some("1e-9,1e-7,1e-5,1e-3")),
    ("grid.axis2", Some("criterion.delta")),
    ("grid.axis2_values", Some("1e-9,1e-7,1e-5,1e-3")),
    ("output.dir", Some("out")),
    ("output.plot", Some("false")),
    ("sampling.gamma", Some("2")),
    ("sampling.points", Some("equispaced")),
    ("sampling.seed", Some("0")),
    ("solver.alpha", Some("1")),
    ("solver.weight", Some("none")),
    ("strategy", Some("bisection")),
    ("sweep.epsilon", Some("1e-12")),
    ("sweep.n", Some("1:100")),
    ("timing.repeats", Some("7")),
];

fn known(key: &str) -> bool {
    KEYS.iter().any(|(k, _)| *k == key)
}

/// Raw key/value pairs with their provenance.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RawConfig {
    entries: BTreeMap<String, (String, Source)>,
    /// Number of lines read from the config file, if any.
    pub file_lines: Option<usize>,
}

fn split_pair(text: &str) -> Option<(&str, &str)> {
    let (k, v) = text.split_once('=')?;
    Some((k.trim(), v.trim()))
}

impl RawConfig {
    pub fn parse(text: &str) -> ConfigResult<Self> {
        let mut raw = Self { file_lines: Some(text.lines().count()), ..Self::default() };
        for (i, line) in text.lines().enumerate() {
            let content = line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let src = Source::Line(i + 1);
            let Some((key, value)) = split_pair(content) else {
                return err(Some(src), format!("expected `key = value`, found `{content}`"));
            };
            if raw.entries.get(key).is_some_and(|(_, s)| matches!(s, Source::Line(_))) {
                return err(Some(src), format!("duplicate key `{key}`"));
            }
            raw.insert(key, value, src)?;
        }
        Ok(raw)
    }

    pub fn insert(&mut self, key: &str, value: &str, source: Source) -> ConfigResult<()> {
        if !known(key) {
            return err(Some(source), format!("unknown key `{key}`"));
        }
        if value.is_empty() {
            return err(Some(source), format!("empty value for `{key}`"));
        }
        self.entries.insert(key.to_string(), (value.to_string(), source));
        Ok(())
    }

    /// Applies a `key=value` override.
    pub fn set(&mut self, assignment: &str) -> ConfigResult<()> {
        let source = Source::Override(assignment.to_string());
        match split_pair(assignment) {
            Some((k, v)) => self.insert(k, v, source),
            None => err(Some(source), "expected `key=value`"),
        }
    }

    /// Applies preset values; anything already set wins.
    pub fn with_defaults_from(mut self, preset: &[(&str, &str)]) -> Self {
        for (k, v) in preset {
            self.entries.entry(k.to_string()).or_insert_with(|| (v.to_string(), Source::Preset));
        }
        self
    }

    fn get(&self, key: &str) -> Option<(&str, &Source)> {
        self.entries.get(key).map(|(v, s)| (v.as_str(), s))
    }

    fn missing(&self, key: &str) -> ConfigError {
        let message = format!("missing required key `{key}`");
        match self.file_lines {
            Some(n) => ConfigError { source: Some(Source::Line(n + 1)), message: format!("{message} (end of file)") },
            None => ConfigError { source: None, message: format!("{message}; set it with --set {key}=<value>") },
        }
    }
}

struct Reader<'a> {
    raw: &'a RawConfig,
}

impl Reader<'_> {
    fn value(&self, key: &str) -> (String, Option<Source>) {
        match self.raw.get(key) {
            Some((v, s)) => (v.to_string(), Some(s.clone())),
            None => {
                let default = KEYS.iter().find(|(k, _)| *k == key).and_then(|(_, d)| *d);
                (default.expect("key has a default").to_string(), None)
            }
        }
    }

    fn parse<T: FromStr>(&self, key: &str) -> ConfigResult<T> {
        let (v, s) = self.value(key);
        v.parse().or_else(|_| err(s, format!("cannot parse `{v}` for `{key}`")))
    }

    fn positive(&self, key: &str) -> ConfigResult<f64> {
        let x: f64 = self.parse(key)?;
        if x.is_finite() && x > 0.0 {
            Ok(x)
        } else {
            err(self.value(key).1, format!("`{key}` must be positive, got {x}"))
        }
    }

    fn choice<T: Copy>(&self, key: &str, options: &[(&str, T)]) -> ConfigResult<T> {
        let (v, s) = self.value(key);
        match options.iter().find(|(name, _)| *name == v) {
            Some((_, t)) => Ok(*t),
            None => {
                let names: Vec<_> = options.iter().map(|(n, _)| *n).collect();
                err(s, format!("`{key}` must be one of {}, got `{v}`", names.join(", ")))
            }
        }
    }

    fn list<T: FromStr>(&self, key: &str) -> ConfigResult<Vec<T>> {
        let (v, s) = self.value(key);
        v.split(',')
            .map(|item| item.trim().parse().or_else(|_| err(s.clone(), format!("cannot parse `{item}` in `{key}`"))))
            .collect()
    }

    fn bounds(&self, key: &str) -> ConfigResult<Vec<(f64, f64)>> {
        let (v, s) = self.value(key);
        v.split(';')
            .map(|pair| {
                let nums: Vec<f64> = pair
                    .split(',')
                    .map(|x| x.trim().parse())
                    .collect::<Result<_, _>>()
                    .or_else(|_| err(s.clone(), format!("cannot parse interval `{pair}` in `{key}`")))?;
                match nums[..] {
                    [a, b] if a < b => Ok((a, b)),
                    _ => err(s.clone(), format!("`{key}` needs `a,b` with a < b per dimension, got `{pair}`")),
                }
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DomainKind {
    Interval,
    Box,
    Disk,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DictionaryKind {
    Fourier,
    Chebyshev,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FunctionName {
    Exp,
    X,
    Constant,
    Cos,
    ExpCos8Pi,
    ExpCos5,
    ExpNoise,
    Singular2d,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeightKind {
    None,
    Cubic,
    Algebraic,
    Incremental,
}

const DOMAIN_KINDS: &[(&str, DomainKind)] =
    &[("interval", DomainKind::Interval), ("box", DomainKind::Box), ("disk", DomainKind::Disk)];
const DICTIONARY_KINDS: &[(&str, DictionaryKind)] =
    &[("fourier", DictionaryKind::Fourier), ("chebyshev", DictionaryKind::Chebyshev)];
const FUNCTIONS: &[(&str, FunctionName)] = &[
    ("exp", FunctionName::Exp),
    ("x", FunctionName::X),
    ("constant", FunctionName::Constant),
    ("cos", FunctionName::Cos),
    ("exp_cos_8pi", FunctionName::ExpCos8Pi),
    ("exp_cos_5", FunctionName::ExpCos5),
    ("exp_noise", FunctionName::ExpNoise),
    ("singular_2d", FunctionName::Singular2d),
];
const WEIGHTS: &[(&str, WeightKind)] = &[
    ("none", WeightKind::None),
    ("cubic", WeightKind::Cubic),
    ("algebraic", WeightKind::Algebraic),
    ("incremental", WeightKind::Incremental),
];
const POINT_KINDS: &[(&str, PointKind)] =
    &[("equispaced", PointKind::Equispaced), ("random", PointKind::RandomUniform)];
const STRATEGIES: &[(&str, Strategy)] = &[("incremental", Strategy::Incremental), ("bisection", Strategy::Bisection)];
const BOOLS: &[(&str, bool)] = &[("true", true), ("false", false)];

fn name_of<T: PartialEq + Copy>(options: &[(&'static str, T)], value: T) -> &'static str {
    options.iter().find(|(_, t)| *t == value).map(|(n, _)| *n).expect("every variant is listed")
}

/// Sizes for a sweep: `a:b`, `a:b:step` or a comma-separated list.
pub fn parse_sizes(text: &str) -> Option<Vec<usize>> {
    if text.contains(':') {
        let parts: Vec<usize> = text.split(':').map(|p| p.trim().parse().ok()).collect::<Option<_>>()?;
        let (a, b, step) = match parts[..] {
            [a, b] => (a, b, 1),
            [a, b, s] => (a, b, s),
            _ => return None,
        };
        (a >= 1 && a <= b && step >= 1).then(|| (a..=b).step_by(step).collect())
    } else {
        text.split(',').map(|p| p.trim().parse().ok().filter(|&n: &usize| n >= 1)).collect()
    }
}

/// The typed, validated configuration of one experiment.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub domain_kind: DomainKind,
    pub domain_bounds: Vec<(f64, f64)>,
    pub domain_center: (f64, f64),
    pub domain_radius: f64,
    pub dictionary_kind: DictionaryKind,
    pub dictionary_support: Vec<(f64, f64)>,
    pub weighted_copy: bool,
    pub function: FunctionName,
    pub p: f64,
    pub sigma: f64,
    pub scale: f64,
    pub value: f64,
    pub criterion: StoppingCriterion,
    pub strategy: Strategy,
    pub gamma: f64,
    pub point_kind: PointKind,
    pub scheme_seed: u64,
    pub solver_weight: WeightKind,
    pub alpha: f64,
    pub approximate_n: Option<usize>,
    pub sweep_n: Vec<usize>,
    pub sweep_epsilon: Vec<f64>,
    pub grid_axis1: String,
    pub grid_axis1_values: Vec<f64>,
    pub grid_axis2: String,
    pub grid_axis2_values: Vec<f64>,
    pub family_p: Vec<f64>,
    pub timing_repeats: usize,
    pub output_dir: String,
    pub plot: bool,
}

fn fmt_bounds(b: &[(f64, f64)]) -> String {
    b.iter().map(|(a, b)| format!("{a},{b}")).collect::<Vec<_>>().join(";")
}

fn fmt_list<T: fmt::Display>(v: &[T]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

fn fmt_f(x: f64) -> String {
    if x != 0.0 && (x.abs() < 1e-3 || x.abs() >= 1e6) {
        format!("{x:e}")
    } else {
        x.to_string()
    }
}

impl ExperimentConfig {
    pub fn from_raw(raw: &RawConfig) -> ConfigResult<Self> {
        let r = Reader { raw };
        let delta: f64 = r.parse("criterion.delta")?;
        let delta_prime = match raw.get("criterion.delta_prime") {
            Some(_) => r.parse("criterion.delta_prime")?,
            None => delta,
        };
        let epsilon = match raw.get("criterion.epsilon") {
            Some(_) => r.parse("criterion.epsilon")?,
            None => delta / 100.0,
        };
        let mu = match r.value("criterion.mu").0.as_str() {
            "none" => None,
            _ => Some(r.positive("criterion.mu")?),
        };
        let criterion = StoppingCriterion {
            delta,
            delta_prime,
            epsilon,
            test_points: r.parse("criterion.q")?,
            seed: r.parse("criterion.seed")?,
            n_max: r.parse("criterion.n_max")?,
            mu,
        };
        if let Err(e) = criterion.validate() {
            let src = ["criterion.delta", "criterion.delta_prime", "criterion.epsilon", "criterion.n_max"]
                .iter()
                .find_map(|k| raw.get(k).map(|(_, s)| s.clone()));
            return err(src, e.to_string());
        }
        let approximate_n = match raw.get("approximate.n") {
            Some(_) => Some(r.parse("approximate.n")?),
            None => None,
        };
        let (sweep_text, sweep_src) = r.value("sweep.n");
        let sweep_n = parse_sizes(&sweep_text)
            .ok_or_else(|| ConfigError { source: sweep_src, message: format!("invalid sizes `{sweep_text}`") })?;
        let grid_axis1 = r.value("grid.axis1").0;
        let grid_axis2 = r.value("grid.axis2").0;
        for key in ["grid.axis1", "grid.axis2"] {
            let (axis, src) = r.value(key);
            if !known(&axis) || axis.starts_with("grid.") {
                return err(src, format!("`{key}` must name a config key, got `{axis}`"));
            }
        }
        let cfg = Self {
            domain_kind: r.choice("domain.kind", DOMAIN_KINDS)?,
            domain_bounds: r.bounds("domain.bounds")?,
            domain_center: match r.list::<f64>("domain.center")?[..] {
                [x, y] => (x, y),
                _ => return err(r.value("domain.center").1, "`domain.center` needs two coordinates"),
            },
            domain_radius: r.positive("domain.radius")?,
            dictionary_kind: r.choice("dictionary.kind", DICTIONARY_KINDS)?,
            dictionary_support: r.bounds("dictionary.support")?,
            weighted_copy: r.choice("dictionary.weighted_copy", &[("none", false), ("radial", true)])?,
            function: r.choice("function.name", FUNCTIONS)?,
            p: r.parse("function.p")?,
            sigma: r.parse("function.sigma")?,
            scale: r.parse("function.scale")?,
            value: r.parse("function.value")?,
            criterion,
            strategy: r.choice("strategy", STRATEGIES)?,
            gamma: r.parse("sampling.gamma")?,
            point_kind: r.choice("sampling.points", POINT_KINDS)?,
            scheme_seed: r.parse("sampling.seed")?,
            solver_weight: r.choice("solver.weight", WEIGHTS)?,
            alpha: r.parse("solver.alpha")?,
            approximate_n,
            sweep_n,
            sweep_epsilon: r.list("sweep.epsilon")?,
            grid_axis1,
            grid_axis1_values: r.list("grid.axis1_values")?,
            grid_axis2,
            grid_axis2_values: r.list("grid.axis2_values")?,
            family_p: r.list("family.p_values")?,
            timing_repeats: r.parse("timing.repeats")?,
            output_dir: r.value("output.dir").0,
            plot: r.choice("output.plot", BOOLS)?,
        };
        if cfg.gamma <= 1.0 {
            return err(r.value("sampling.gamma").1, "`sampling.gamma` must exceed 1");
        }
        if cfg.timing_repeats == 0 {
            return err(r.value("timing.repeats").1, "`timing.repeats` must be at least 1");
        }
        if cfg.sweep_epsilon.iter().any(|e| !(*e > 0.0)) {
            return err(r.value("sweep.epsilon").1, "sweep thresholds must be positive");
        }
        cfg.domain().map_err(|e| ConfigError { source: r.value("domain.bounds").1, message: e.to_string() })?;
        cfg.dictionary().map_err(|e| ConfigError { source: r.value("dictionary.support").1, message: e.to_string() })?;
        Ok(cfg)
    }

    pub fn bounds_text(bounds: &[(f64, f64)]) -> String {
        fmt_bounds(bounds)
    }

    pub fn approximate_n(&self, raw: &RawConfig) -> ConfigResult<usize> {
        self.approximate_n.ok_or_else(|| raw.missing("approximate.n"))
    }

    /// Every key with its effective value.
    pub fn to_map(&self) -> BTreeMap<String, String> {
        let c = &self.criterion;
        let mut m = BTreeMap::new();
        let mut put = |k: &str, v: String| {
            m.insert(k.to_string(), v);
        };
        if let Some(n) = self.approximate_n {
            put("approximate.n", n.to_string());
        }
        put("criterion.delta", fmt_f(c.delta));
        put("criterion.delta_prime", fmt_f(c.delta_prime));
        put("criterion.epsilon", fmt_f(c.epsilon));
        put("criterion.mu", c.mu.map_or("none".into(), fmt_f));
        put("criterion.n_max", c.n_max.to_string());
        put("criterion.q", c.test_points.to_string());
        put("criterion.seed", c.seed.to_string());
        put("dictionary.kind", name_of(DICTIONARY_KINDS, self.dictionary_kind).into());
        put("dictionary.support", fmt_bounds(&self.dictionary_support));
        put("dictionary.weighted_copy", if self.weighted_copy { "radial" } else { "none" }.into());
        put("domain.bounds", fmt_bounds(&self.domain_bounds));
        put("domain.center", format!("{},{}", self.domain_center.0, self.domain_center.1));
        put("domain.kind", name_of(DOMAIN_KINDS, self.domain_kind).into());
        put("domain.radius", fmt_f(self.domain_radius));
        put("family.p_values", self.family_p.iter().map(|x| fmt_f(*x)).collect::<Vec<_>>().join(","));
        put("function.name", name_of(FUNCTIONS, self.function).into());
        put("function.p", fmt_f(self.p));
        put("function.scale", fmt_f(self.scale));
        put("function.sigma", fmt_f(self.sigma));
        put("function.value", fmt_f(self.value));
        put("grid.axis1", self.grid_axis1.clone());
        put("grid.axis1_values", self.grid_axis1_values.iter().map(|x| fmt_f(*x)).collect::<Vec<_>>().join(","));
        put("grid.axis2", self.grid_axis2.clone());
        put("grid.axis2_values", self.grid_axis2_values.iter().map(|x| fmt_f(*x)).collect::<Vec<_>>().join(","));
        put("output.dir", self.output_dir.clone());
        put("output.plot", self.plot.to_string());
        put("sampling.gamma", fmt_f(self.gamma));
        put("sampling.points", name_of(POINT_KINDS, self.point_kind).into());
        put("sampling.seed", self.scheme_seed.to_string());
        put("solver.alpha", fmt_f(self.alpha));
        put("solver.weight", name_of(WEIGHTS, self.solver_weight).into());
        put("strategy", name_of(STRATEGIES, self.strategy).into());
        put("sweep.epsilon", self.sweep_epsilon.iter().map(|x| fmt_f(*x)).collect::<Vec<_>>().join(","));
        put("sweep.n", fmt_list(&self.sweep_n));
        put("timing.repeats", self.timing_repeats.to_string());
        m
    }

    /// The config file text, one sorted `key = value` per line.
    pub fn serialize(&self) -> String {
        self.to_map().iter().map(|(k, v)| format!("{k} = {v}\n")).collect()
    }

    pub fn domain(&self) -> crate::Result<Domain> {
        match self.domain_kind {
            DomainKind::Interval => match self.domain_bounds[..] {
                [(a, b)] => Domain::interval(a, b),
                _ => Err(crate::Error::InvalidDomain("an interval needs exactly one `a,b` pair".into())),
            },
            DomainKind::Box => Domain::cube(self.domain_bounds.clone()),
            DomainKind::Disk => Domain::disk(self.domain_center, self.domain_radius, self.domain_bounds.clone()),
        }
    }

    pub fn dictionary(&self) -> crate::Result<Dictionary> {
        let base = match (self.dictionary_kind, &self.dictionary_support[..]) {
            (DictionaryKind::Fourier, _) => Dictionary::fourier_box(&self.dictionary_support)?,
            (DictionaryKind::Chebyshev, [(a, b)]) => Dictionary::chebyshev(*a, *b)?,
            (DictionaryKind::Chebyshev, support) => {
                Dictionary::tensor(support.iter().map(|&(a, b)| Dictionary::chebyshev(a, b)).collect::<crate::Result<_>>()?)?
            }
        };
        Ok(if self.weighted_copy { Dictionary::with_weighted_copy(base, WeightFn::radial()) } else { base })
    }

    pub fn function(&self) -> Function {
        let f = match self.function {
            FunctionName::Exp => Function::exp(),
            FunctionName::X => Function::identity(),
            FunctionName::Constant => Function::constant(self.value),
            FunctionName::Cos => Function::cos(self.p),
            FunctionName::ExpCos8Pi => Function::exp_cos_8pi(),
            FunctionName::ExpCos5 => Function::exp_cos_5(),
            FunctionName::ExpNoise => Function::exp_with_noise(self.sigma),
            FunctionName::Singular2d => Function::singular_2d(self.p),
        };
        if self.scale == 1.0 {
            f
        } else {
            f.scaled(self.scale)
        }
    }

    pub fn rule(&self) -> OversamplingRule {
        OversamplingRule::new(self.gamma).expect("gamma validated on parse")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_derived_from_delta() {
        let mut raw = RawConfig::default();
        raw.set("criterion.delta=1e-6").unwrap();
        let cfg = ExperimentConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.criterion.delta_prime, 1e-6);
        assert_eq!(cfg.criterion.epsilon, 1e-8);
        assert_eq!(cfg.criterion.test_points, 3);
    }

    #[test]
    fn serialization_round_trips() {
        let text = "function.name = cos\nfunction.p = 500 # oscillatory\n\ncriterion.epsilon = 1e-12\nsweep.n = 2:20:3\n";
        let cfg = ExperimentConfig::from_raw(&RawConfig::parse(text).unwrap()).unwrap();
        let once = cfg.serialize();
        let again = ExperimentConfig::from_raw(&RawConfig::parse(&once).unwrap()).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.serialize(), once);
        assert_eq!(cfg.sweep_n, vec![2, 5, 8, 11, 14, 17, 20]);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let e = RawConfig::parse("strategy = bisection\nnot a pair\n").unwrap_err();
        assert_eq!(e.source, Some(Source::Line(2)));
        let e = RawConfig::parse("\nbogus.key = 1\n").unwrap_err();
        assert!(e.to_string().starts_with("line 2: unknown key"));
        let raw = RawConfig::parse("criterion.delta = 1e-3\ncriterion.q = many\n").unwrap();
        let e = ExperimentConfig::from_raw(&raw).unwrap_err();
        assert_eq!(e.source, Some(Source::Line(2)));
        let raw = RawConfig::parse("criterion.delta = 2\n").unwrap();
        assert_eq!(ExperimentConfig::from_raw(&raw).unwrap_err().source, Some(Source::Line(1)));
    }

    #[test]
    fn missing_required_key_points_past_the_file() {
        let raw = RawConfig::parse("a.b = 1\n").err();
        assert!(raw.is_some());
        let raw = RawConfig::parse("function.name = x\n").unwrap();
        let cfg = ExperimentConfig::from_raw(&raw).unwrap();
        let e = cfg.approximate_n(&raw).unwrap_err();
        assert_eq!(e.source, Some(Source::Line(2)));
        assert!(e.message.contains("approximate.n"));
    }

    #[test]
    fn overrides_beat_the_file() {
        let mut raw = RawConfig::parse("function.p = 3\n").unwrap();
        raw.set("function.p=7").unwrap();
        assert_eq!(ExperimentConfig::from_raw(&raw).unwrap().p, 7.0);
        assert!(raw.set("function.p").is_err());
    }

    #[test]
    fn sizes() {
        assert_eq!(parse_sizes("3:5"), Some(vec![3, 4, 5]));
        assert_eq!(parse_sizes("10,20"), Some(vec![10, 20]));
        assert_eq!(parse_sizes("0:3"), None);
        assert_eq!(parse_sizes("a"), None);
    }

    #[test]
    fn builds_disk_problem() {
        let mut raw = RawConfig::default();
        for s in [
            "domain.kind=disk",
            "domain.bounds=-1,1;-1,1",
            "dictionary.support=-1,1;-1,1",
            "dictionary.weighted_copy=radial",
            "function.name=singular_2d",
        ] {
            raw.set(s).unwrap();
        }
        let cfg = ExperimentConfig::from_raw(&raw).unwrap();
        assert_eq!(cfg.domain().unwrap().dim(), 2);
        assert_eq!(cfg.dictionary().unwrap().dim(), 2);
    }
}

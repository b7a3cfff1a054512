//! Plain-text run description.
//!
//! ```text
//! # comment
//! [field]
//! variant = random_swirl_free     # see `FieldVariant::label`
//! gamma = 0
//! n = 8                           # minimizers and combined
//! seed = 0                        # random variants
//! complexity = 4
//! term = 1.0 0.0 4.0 0.5 0.0 1    # amplitude center width lambda phase nu; repeatable
//! profile_s = 0, 0.5, 1           # optional tabulated profile
//! profile_values = 1, 0.6, 0
//!
//! [grid]
//! t_min = -10                     # or half_width = 10
//! t_max = 10
//! n_t = 1025
//! n_theta = 24
//! n_phi = 1
//! theta_panels = 4                # optional composite rule
//!
//! [run]
//! samples = 50                    # random variants: seeds seed .. seed+samples
//! level = u                       # u or v
//! route = direct                  # direct, spectral or both
//! nu_max = 24
//! ```
//!
//! Without a `[grid]` section the grid follows `GridPolicy` for minimizers and
//! defaults to `[-10, 10] × 1025 × 24` otherwise.

use crate::error::{Error, Result};
use crate::fields::{FieldSpec, FieldVariant, Level, Profile, StreamTerm};
use crate::geometry::{GridSpec, ThetaRule};
use crate::quotient::GridPolicy;
use std::collections::BTreeMap;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RouteChoice {
    Direct,
    Spectral,
    Both,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunSection {
    pub samples: usize,
    pub level: Level,
    pub route: RouteChoice,
    pub nu_max: Option<usize>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self { samples: 1, level: Level::Original, route: RouteChoice::Direct, nu_max: None }
    }
}

/// A parsed spec file.
#[derive(Debug, Clone)]
pub struct SpecFile {
    pub field: FieldSpec,
    pub run: RunSection,
}

type Section = BTreeMap<String, (usize, String)>;

struct Raw {
    sections: BTreeMap<String, Section>,
    terms: Vec<(usize, String)>,
}

fn err(line: usize, msg: impl Into<String>) -> Error {
    Error::SpecParse { line, msg: msg.into() }
}

fn tokenize(text: &str) -> Result<Raw> {
    let mut sections: BTreeMap<String, Section> = BTreeMap::new();
    let mut terms = Vec::new();
    let mut current: Option<String> = None;
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        if let Some(name) = body.strip_prefix('[').and_then(|b| b.strip_suffix(']')) {
            let name = name.trim().to_string();
            if !matches!(name.as_str(), "field" | "grid" | "run") {
                return Err(err(line, format!("unknown section [{name}]")));
            }
            if sections.contains_key(&name) {
                return Err(err(line, format!("section [{name}] repeated")));
            }
            sections.insert(name.clone(), Section::new());
            current = Some(name);
            continue;
        }
        let Some(sec) = current.as_ref() else {
            return Err(err(line, "key outside of a section"));
        };
        let Some((key, value)) = body.split_once('=') else {
            return Err(err(line, "expected `key = value`"));
        };
        let (key, value) = (key.trim().to_string(), value.trim().to_string());
        if sec == "field" && key == "term" {
            terms.push((line, value));
            continue;
        }
        let map = sections.get_mut(sec).expect("section inserted above");
        if map.insert(key.clone(), (line, value)).is_some() {
            return Err(err(line, format!("key `{key}` repeated")));
        }
    }
    Ok(Raw { sections, terms })
}

struct Reader<'a> {
    map: Option<&'a Section>,
    used: Vec<&'a str>,
    end_line: usize,
}

impl<'a> Reader<'a> {
    fn new(map: Option<&'a Section>, end_line: usize) -> Self {
        Self { map, used: Vec::new(), end_line }
    }

    fn get<T: FromStr>(&mut self, key: &'a str) -> Result<Option<T>> {
        let Some((line, value)) = self.map.and_then(|m| m.get(key)) else {
            return Ok(None);
        };
        self.used.push(key);
        value
            .parse()
            .map(Some)
            .map_err(|_| err(*line, format!("cannot parse `{key}` from `{value}`")))
    }

    fn require<T: FromStr>(&mut self, key: &'a str, section: &str) -> Result<T> {
        self.get(key)?
            .ok_or_else(|| err(self.end_line, format!("[{section}] needs `{key}`")))
    }

    fn list(&mut self, key: &'a str) -> Result<Option<Vec<f64>>> {
        let Some((line, value)) = self.map.and_then(|m| m.get(key)) else {
            return Ok(None);
        };
        self.used.push(key);
        value
            .split(',')
            .map(|s| s.trim().parse::<f64>().map_err(|_| err(*line, format!("bad number in `{key}`"))))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn finish(self, section: &str) -> Result<()> {
        if let Some(m) = self.map {
            for (key, (line, _)) in m {
                if !self.used.contains(&key.as_str()) {
                    return Err(err(*line, format!("unknown key `{key}` in [{section}]")));
                }
            }
        }
        Ok(())
    }
}

fn parse_term(line: usize, s: &str) -> Result<StreamTerm> {
    let parts: Vec<&str> = s.split_whitespace().collect();
    if parts.len() != 6 {
        return Err(err(line, "term needs: amplitude center width lambda phase nu"));
    }
    let num = |i: usize| parts[i].parse::<f64>().map_err(|_| err(line, format!("bad number `{}`", parts[i])));
    let nu = parts[5].parse::<usize>().map_err(|_| err(line, "nu must be a positive integer"))?;
    Ok(StreamTerm { amplitude: num(0)?, center: num(1)?, width: num(2)?, lambda: num(3)?, phase: num(4)?, nu })
}

fn parse_level(s: &str) -> Result<Level> {
    match s {
        "u" | "original" => Ok(Level::Original),
        "v" | "transformed" => Ok(Level::Transformed),
        other => Err(Error::InvalidConfig(format!("unknown level `{other}`"))),
    }
}

impl FromStr for Level {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_level(s)
    }
}

impl FromStr for RouteChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(RouteChoice::Direct),
            "spectral" => Ok(RouteChoice::Spectral),
            "both" => Ok(RouteChoice::Both),
            other => Err(Error::InvalidConfig(format!("unknown route `{other}`"))),
        }
    }
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw = tokenize(text)?;
        let end = text.lines().count().max(1);
        let mut f = Reader::new(raw.sections.get("field"), end);
        if f.map.is_none() {
            return Err(err(end, "missing [field] section"));
        }
        let variant_name: String = f.require("variant", "field")?;
        let gamma: f64 = f.get("gamma")?.unwrap_or(0.0);
        let n: Option<usize> = f.get("n")?;
        let seed: u64 = f.get("seed")?.unwrap_or(0);
        let complexity: usize = f.get("complexity")?.unwrap_or(4);
        let profile_s = f.list("profile_s")?;
        let profile_values = f.list("profile_values")?;
        f.finish("field")?;
        let terms = raw.terms.iter().map(|(l, s)| parse_term(*l, s)).collect::<Result<Vec<_>>>()?;

        let need_n = |n: Option<usize>| n.ok_or_else(|| err(end, format!("variant `{variant_name}` needs `n`")));
        let need_terms = || {
            if terms.is_empty() {
                Err(err(end, format!("variant `{variant_name}` needs at least one `term`")))
            } else {
                Ok(terms.clone())
            }
        };
        let variant = match variant_name.as_str() {
            "swirl_free_minimizer" => FieldVariant::SwirlFreeMinimizer { n: need_n(n)? },
            "swirl_minimizer" => FieldVariant::SwirlMinimizer { n: need_n(n)? },
            "stream" => FieldVariant::Stream { terms: need_terms()? },
            "axisym_swirl" => FieldVariant::AxisymSwirl { terms: need_terms()? },
            "combined" => FieldVariant::Combined {
                n: need_n(n)?,
                swirl: if terms.is_empty() { vec![StreamTerm::sin_bump(GridPolicy::default().swirl_width)?] } else { terms.clone() },
            },
            "random_swirl_free" => FieldVariant::RandomSwirlFree { seed, complexity },
            "random_swirl" => FieldVariant::RandomSwirl { seed, complexity },
            other => return Err(err(end, format!("unknown variant `{other}`"))),
        };
        let profile = match (profile_s, profile_values) {
            (Some(s), Some(v)) => Profile::from_table(&s, &v)?,
            (None, None) => Profile::StandardBump,
            _ => return Err(err(end, "profile_s and profile_values go together")),
        };

        let mut g = Reader::new(raw.sections.get("grid"), end);
        let grid = if g.map.is_some() {
            let half: Option<f64> = g.get("half_width")?;
            let (t_min, t_max) = match half {
                Some(h) => (-h, h),
                None => (g.require("t_min", "grid")?, g.require("t_max", "grid")?),
            };
            let n_t = g.require("n_t", "grid")?;
            let n_theta = g.require("n_theta", "grid")?;
            let n_phi = g.get("n_phi")?.unwrap_or(1);
            let panels: Option<usize> = g.get("theta_panels")?;
            let mut spec = GridSpec::new(t_min, t_max, n_t, n_theta, n_phi)?;
            if let Some(panels) = panels {
                spec = spec.with_theta_rule(ThetaRule::CompositeGaussLegendre { panels })?;
            }
            g.finish("grid")?;
            spec
        } else {
            default_grid(&variant)?
        };

        let mut r = Reader::new(raw.sections.get("run"), end);
        let defaults = RunSection::default();
        let run = RunSection {
            samples: r.get("samples")?.unwrap_or(defaults.samples),
            level: r.get("level")?.unwrap_or(defaults.level),
            route: r.get("route")?.unwrap_or(defaults.route),
            nu_max: r.get("nu_max")?,
        };
        r.finish("run")?;
        if run.samples == 0 {
            return Err(err(end, "samples must be positive"));
        }

        let mut field = FieldSpec::new(variant, gamma, grid);
        field.profile = profile;
        Ok(Self { field, run })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// The field specs this run evaluates: one per seed for random variants.
    pub fn expand(&self) -> Vec<(Option<u64>, FieldSpec)> {
        match self.field.variant {
            FieldVariant::RandomSwirlFree { seed, complexity } => (0..self.run.samples as u64)
                .map(|k| {
                    let mut f = self.field.clone();
                    f.variant = FieldVariant::RandomSwirlFree { seed: seed + k, complexity };
                    (Some(seed + k), f)
                })
                .collect(),
            FieldVariant::RandomSwirl { seed, complexity } => (0..self.run.samples as u64)
                .map(|k| {
                    let mut f = self.field.clone();
                    f.variant = FieldVariant::RandomSwirl { seed: seed + k, complexity };
                    (Some(seed + k), f)
                })
                .collect(),
            _ => vec![(None, self.field.clone())],
        }
    }
}

fn default_grid(variant: &FieldVariant) -> Result<GridSpec> {
    let policy = GridPolicy::default();
    match variant {
        FieldVariant::SwirlFreeMinimizer { n } | FieldVariant::SwirlMinimizer { n } => policy.grid_for(*n as f64),
        FieldVariant::Combined { n, swirl } => {
            let reach = swirl.iter().map(|t| t.center.abs() + t.width).fold(*n as f64, f64::max);
            policy.grid_for(reach)
        }
        _ => GridSpec::symmetric(10.0, 1025, 24),
    }
}

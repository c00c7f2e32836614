//! JSON configuration: map definitions, strip maps, and run settings.

use crate::coherence_lab::{BoundInputs, GrowthOptions, HuntOptions, IntegrationOptions};
use crate::cone_analysis::{self, ConeField, ConeSpec};
use crate::error::{Error, Result};
use crate::semiconjugacy::{self, SolveOptions, StripMap};
use crate::torus_map::{IntegerMatrix, TorusMap, TrigPolynomial, ValidationOptions, Vec2};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// A torus map with an optional embedded cone field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapDefinition {
    pub linear: IntegerMatrix,
    #[serde(default)]
    pub pert_x: TrigPolynomial,
    #[serde(default)]
    pub pert_y: TrigPolynomial,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<ConeSpec>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub allow_degree_one: bool,
}

impl MapDefinition {
    pub fn parse(text: &str) -> Result<Self> {
        let def: Self = serde_json::from_str(text)?;
        def.torus_map().check_structure()?;
        Ok(def)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(crate::report::to_json(self)?)
    }

    pub fn torus_map(&self) -> TorusMap {
        TorusMap::linear(self.linear).with_perturbation(self.pert_x.clone(), self.pert_y.clone())
    }

    /// The map after the degree and local-diffeomorphism checks.
    pub fn validated_map(&self) -> Result<TorusMap> {
        let map = self.torus_map();
        map.validate(&ValidationOptions {
            allow_degree_one: self.allow_degree_one,
            ..Default::default()
        })?;
        Ok(map)
    }
}

pub fn parse_strip(text: &str) -> Result<StripMap> {
    let s: StripMap = serde_json::from_str(text)?;
    s.validate()?;
    Ok(s)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub tangency: f64,
    pub closure: f64,
    pub closure_angle: f64,
    pub invariance: f64,
    pub solver: f64,
    pub center: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            tangency: crate::coherence_lab::DEFAULT_TANGENCY_TOL,
            closure: crate::coherence_lab::DEFAULT_CLOSURE_TOL,
            closure_angle: crate::coherence_lab::DEFAULT_CLOSURE_ANGLE,
            invariance: crate::coherence_lab::DEFAULT_INVARIANCE_TOL,
            solver: semiconjugacy::DEFAULT_TOL,
            center: cone_analysis::DEFAULT_TOL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct HuntSettings {
    pub seeds: usize,
    pub period_max: usize,
    pub jitter: f64,
    pub refine: bool,
    pub step: f64,
    pub max_len: f64,
}

impl Default for HuntSettings {
    fn default() -> Self {
        Self {
            seeds: crate::coherence_lab::DEFAULT_SEEDS,
            period_max: crate::coherence_lab::DEFAULT_PERIOD_MAX,
            jitter: 0.0,
            refine: true,
            step: crate::coherence_lab::DEFAULT_STEP,
            max_len: crate::coherence_lab::DEFAULT_MAX_LEN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SemiconjSettings {
    pub grid: (usize, usize),
    pub max_iters: usize,
}

impl Default for SemiconjSettings {
    fn default() -> Self {
        Self {
            grid: semiconjugacy::DEFAULT_GRID,
            max_iters: semiconjugacy::DEFAULT_MAX_ITERS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GrowthSettings {
    /// Initial segment; defaults to a short segment along the cone axis at
    /// the centre of the torus.
    pub segment: Option<[Vec2; 2]>,
    pub segment_length: f64,
    pub n_max: usize,
    pub resample_step: f64,
    pub cell: f64,
    pub tangency_slack: f64,
    pub bounds: BoundInputs,
}

impl Default for GrowthSettings {
    fn default() -> Self {
        let g = GrowthOptions::default();
        Self {
            segment: None,
            segment_length: 0.01,
            n_max: g.n_max,
            resample_step: g.resample_step,
            cell: g.cell,
            tangency_slack: g.tangency_slack,
            bounds: BoundInputs::default(),
        }
    }
}

/// Settings shared by all subcommands. Input paths are relative to the
/// config file's directory; `output_dir` is relative to the working directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub map_file: Option<PathBuf>,
    pub map: Option<MapDefinition>,
    /// Overrides the cone embedded in the map definition.
    pub cone: Option<ConeSpec>,
    pub strip_file: Option<PathBuf>,
    pub strip: Option<StripMap>,
    pub grid_n: usize,
    pub depth: usize,
    pub tolerances: Tolerances,
    pub hunt: HuntSettings,
    pub semiconj: SemiconjSettings,
    pub growth: GrowthSettings,
    pub output_dir: PathBuf,
    pub rng_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            map_file: None,
            map: None,
            cone: None,
            strip_file: None,
            strip: None,
            grid_n: cone_analysis::DEFAULT_GRID,
            depth: cone_analysis::DEFAULT_DEPTH,
            tolerances: Tolerances::default(),
            hunt: HuntSettings::default(),
            semiconj: SemiconjSettings::default(),
            growth: GrowthSettings::default(),
            output_dir: PathBuf::from("out"),
            rng_seed: 0,
        }
    }
}

fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config and resolves its input paths against the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cfg = Self::parse(&std::fs::read_to_string(path)?)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.map_file, &mut cfg.strip_file]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(16..=4096).contains(&self.grid_n) || !self.grid_n.is_power_of_two() {
            return Err(Error::Config(format!(
                "grid_n = {} must be a power of two in [16, 4096]",
                self.grid_n
            )));
        }
        if self.depth == 0 {
            return Err(Error::Config("depth must be at least 1".into()));
        }
        let t = &self.tolerances;
        for (name, v) in [
            ("tolerances.tangency", t.tangency),
            ("tolerances.closure", t.closure),
            ("tolerances.closure_angle", t.closure_angle),
            ("tolerances.invariance", t.invariance),
            ("tolerances.solver", t.solver),
            ("tolerances.center", t.center),
            ("hunt.step", self.hunt.step),
            ("hunt.max_len", self.hunt.max_len),
            ("growth.segment_length", self.growth.segment_length),
        ] {
            positive(name, v)?;
        }
        if self.map.is_some() && self.map_file.is_some() {
            return Err(Error::Config(
                "give either map or map_file, not both".into(),
            ));
        }
        if self.strip.is_some() && self.strip_file.is_some() {
            return Err(Error::Config(
                "give either strip or strip_file, not both".into(),
            ));
        }
        if self.hunt.seeds == 0 || self.hunt.period_max == 0 {
            return Err(Error::Config(
                "hunt.seeds and hunt.period_max must be at least 1".into(),
            ));
        }
        if !(0.0..1.0).contains(&self.hunt.jitter) {
            return Err(Error::Config("hunt.jitter must lie in [0, 1)".into()));
        }
        let (w, h) = self.semiconj.grid;
        if w < 2 || h < 2 || self.semiconj.max_iters == 0 {
            return Err(Error::Config(
                "semiconj.grid must be at least 2x2 and max_iters positive".into(),
            ));
        }
        self.growth_options().validate()?;
        self.integration_options().validate()?;
        if let Some(c) = &self.cone {
            ConeField::from_spec(c)?;
        }
        if let Some(s) = &self.strip {
            s.validate()?;
        }
        Ok(())
    }

    pub fn map_definition(&self) -> Result<MapDefinition> {
        match (&self.map, &self.map_file) {
            (Some(m), _) => Ok(m.clone()),
            (None, Some(p)) => MapDefinition::parse(&std::fs::read_to_string(p)?),
            (None, None) => Err(Error::Config("no map given (map or map_file)".into())),
        }
    }

    /// Validated map and the cone field (config override, else the map's own).
    pub fn map_and_cones(&self) -> Result<(TorusMap, ConeField)> {
        let def = self.map_definition()?;
        let map = def.validated_map()?;
        let spec = self
            .cone
            .as_ref()
            .or(def.cone.as_ref())
            .ok_or_else(|| Error::Config("no cone field in config or map definition".into()))?;
        Ok((map, ConeField::from_spec(spec)?))
    }

    pub fn strip_map(&self) -> Result<StripMap> {
        match (&self.strip, &self.strip_file) {
            (Some(s), _) => Ok(s.clone()),
            (None, Some(p)) => parse_strip(&std::fs::read_to_string(p)?),
            (None, None) => Err(Error::Config(
                "no strip map given (strip or strip_file)".into(),
            )),
        }
    }

    pub fn integration_options(&self) -> IntegrationOptions {
        IntegrationOptions {
            step: self.hunt.step,
            max_len: self.hunt.max_len,
            closure_tol: self.tolerances.closure,
            closure_angle: self.tolerances.closure_angle,
            tangency_tol: self.tolerances.tangency,
        }
    }

    pub fn hunt_options(&self) -> HuntOptions {
        HuntOptions {
            seeds: self.hunt.seeds,
            period_max: self.hunt.period_max,
            invariance_tol: self.tolerances.invariance,
            jitter: self.hunt.jitter,
            rng_seed: self.rng_seed,
            refine: self.hunt.refine,
            integration: self.integration_options(),
        }
    }

    pub fn solve_options(&self) -> SolveOptions {
        SolveOptions {
            tol: self.tolerances.solver,
            grid: self.semiconj.grid,
            max_iters: self.semiconj.max_iters,
            initial: None,
        }
    }

    pub fn growth_options(&self) -> GrowthOptions {
        GrowthOptions {
            n_max: self.growth.n_max,
            resample_step: self.growth.resample_step,
            cell: self.growth.cell,
            tangency_slack: self.growth.tangency_slack,
        }
    }

    /// The configured segment, or one of `segment_length` along the cone
    /// axis at `(0.5, 0.5)`.
    pub fn growth_segment(&self, cones: &ConeField) -> [Vec2; 2] {
        self.growth.segment.unwrap_or_else(|| {
            let p = [0.5, 0.5];
            let d = cone_analysis::direction(cones.cone_at(p).axis);
            let l = self.growth.segment_length;
            [p, [p[0] + l * d[0], p[1] + l * d[1]]]
        })
    }
}

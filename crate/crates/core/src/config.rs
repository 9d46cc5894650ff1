//! Run configuration: command-line flags merged with an optional TOML file.
//! Values from the file win.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};
use crate::point::Window;
use crate::rational::Rational;
use crate::space::{FuzzyMetricSpace, ScaleParams};
use crate::tnorm::TNorm;

/// Everything a subcommand may read. All rationals are `p/q` strings.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub space: Option<String>,
    pub tnorm: Option<String>,
    pub window: Option<String>,
    #[serde(default)]
    pub scales: Vec<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    #[serde(default)]
    pub t_grid: Vec<String>,
    /// Largest window checked exhaustively by `verify-axioms`.
    pub max_exhaustive: Option<usize>,
    /// Sample size above `max_exhaustive`.
    pub sample: Option<usize>,
    pub witness: Option<PathBuf>,
    pub witness_out: Option<PathBuf>,
    pub map: Option<PathBuf>,
    pub target_space: Option<String>,
    pub target_tnorm: Option<String>,
    pub target_window: Option<String>,
    pub transport: Option<String>,
    pub bound: Option<String>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = read(path)?;
        toml::from_str(&text).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))
    }

    /// Fields set in `file` replace those in `self`.
    pub fn overridden_by(mut self, file: RunConfig) -> Self {
        macro_rules! take {
            ($($f:ident),*) => {$(
                if file.$f.is_some() {
                    self.$f = file.$f;
                }
            )*};
        }
        take!(
            space,
            tnorm,
            window,
            seed,
            out,
            max_exhaustive,
            sample,
            witness,
            witness_out,
            map,
            target_space,
            target_tnorm,
            target_window,
            transport,
            bound
        );
        if !file.scales.is_empty() {
            self.scales = file.scales;
        }
        if !file.t_grid.is_empty() {
            self.t_grid = file.t_grid;
        }
        self
    }

    pub fn space(&self) -> Result<FuzzyMetricSpace> {
        build_space(self.space.as_deref().unwrap_or("standard"), self.tnorm.as_deref())
    }

    pub fn target_space(&self) -> Result<FuzzyMetricSpace> {
        match &self.target_space {
            Some(kind) => build_space(kind, self.target_tnorm.as_deref()),
            None => self.space(),
        }
    }

    pub fn window(&self) -> Result<Window> {
        let spec = self
            .window
            .as_deref()
            .ok_or_else(|| Error::Parse("--window is required".into()))?;
        non_empty(spec.parse()?, spec)
    }

    pub fn target_window(&self) -> Result<Window> {
        match &self.target_window {
            Some(spec) => non_empty(spec.parse()?, spec),
            None => self.window(),
        }
    }

    pub fn scales(&self) -> Result<Vec<ScaleParams>> {
        self.scales.iter().map(|s| s.parse()).collect()
    }

    /// The scales, or an error when none was given.
    pub fn required_scales(&self) -> Result<Vec<ScaleParams>> {
        let s = self.scales()?;
        if s.is_empty() {
            return Err(Error::Parse("at least one --scale r:t is required".into()));
        }
        Ok(s)
    }

    pub fn t_grid(&self) -> Result<Vec<Rational>> {
        if self.t_grid.is_empty() {
            return Ok(["1/2", "1", "2", "7"].iter().map(|s| s.parse().unwrap()).collect());
        }
        self.t_grid.iter().map(|s| Ok(s.parse::<Rational>()?)).collect()
    }

    pub fn optional_scale(value: &Option<String>) -> Result<Option<ScaleParams>> {
        value.as_deref().map(str::parse).transpose()
    }
}

fn build_space(kind: &str, tnorm: Option<&str>) -> Result<FuzzyMetricSpace> {
    let space = FuzzyMetricSpace::builtin(kind)?;
    Ok(match tnorm {
        Some(t) => space.with_tnorm(t.parse::<TNorm>()?),
        None => space,
    })
}

fn non_empty(w: Window, spec: &str) -> Result<Window> {
    if w.is_empty() {
        return Err(Error::Parse(format!("window {spec:?} is empty")));
    }
    Ok(w)
}

pub(crate) fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn file_overrides_flags() {
        let flags = RunConfig {
            space: Some("standard".into()),
            window: Some("0..5".into()),
            scales: vec!["1/2:1".into()],
            ..Default::default()
        };
        let file: RunConfig = toml::from_str(
            r#"
            space = "ratio_minmax"
            scales = ["1/4:1", "1/2:2"]
            "#,
        )
        .unwrap();
        let merged = flags.overridden_by(file);
        assert_eq!(merged.space.as_deref(), Some("ratio_minmax"));
        assert_eq!(merged.window.as_deref(), Some("0..5"));
        let s = merged.scales().unwrap();
        assert_eq!(s[1], ScaleParams::new(q(1, 2), Rational::from_int(2)).unwrap());
    }

    #[test]
    fn bad_values_are_parse_errors() {
        let c = RunConfig {
            scales: vec!["1.5:1".into()],
            window: Some("5..1".into()),
            ..Default::default()
        };
        assert!(c.scales().is_err());
        assert!(matches!(c.window(), Err(Error::Parse(_))));
        assert!(toml::from_str::<RunConfig>("nonsense = 1").is_err());
        assert!(RunConfig {
            space: Some("nope".into()),
            ..Default::default()
        }
        .space()
        .is_err());
    }

    #[test]
    fn default_t_grid() {
        let g = RunConfig::default().t_grid().unwrap();
        assert_eq!(g, vec![q(1, 2), q(1, 1), q(2, 1), q(7, 1)]);
    }
}

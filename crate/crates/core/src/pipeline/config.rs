use std::path::{Path, PathBuf};

use crate::analytics::{EdgeWeighting, HitsConfig, PageRankConfig};
use crate::txgraph::IngestMode;

use super::PipelineError;

/// Where the pipeline reads transactions from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    /// Directory of raw block files.
    Blocks(PathBuf),
    /// Pre-clustered edge-list CSV.
    EdgeList(PathBuf),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub input: InputSource,
    pub out_dir: PathBuf,
    pub price_file: Option<PathBuf>,
    pub difficulty_file: Option<PathBuf>,
    pub p_value: f64,
    pub seed: u64,
    pub grid_step_days: u32,
    pub pagerank: PageRankConfig,
    pub hits: HitsConfig,
    pub ingest_mode: IngestMode,
    pub r_min: u64,
    pub reuse_parts: usize,
}

impl PipelineConfig {
    pub fn grid_step_secs(&self) -> i64 {
        i64::from(self.grid_step_days) * 86_400
    }

    /// Every setting as `key=value`, in a fixed order. The keys are the
    /// ones accepted by [`ConfigOverrides::set`].
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let path = |p: &Path| p.display().to_string();
        let opt = |p: &Option<PathBuf>| p.as_deref().map(path).unwrap_or_default();
        let (blocks, edges) = match &self.input {
            InputSource::Blocks(p) => (path(p), String::new()),
            InputSource::EdgeList(p) => (String::new(), path(p)),
        };
        vec![
            ("blocks_dir", blocks),
            ("edges_file", edges),
            ("price_file", opt(&self.price_file)),
            ("difficulty_file", opt(&self.difficulty_file)),
            ("out_dir", path(&self.out_dir)),
            ("p_value", self.p_value.to_string()),
            ("seed", self.seed.to_string()),
            ("grid_step_days", self.grid_step_days.to_string()),
            ("damping", self.pagerank.damping.to_string()),
            ("tolerance", self.pagerank.tolerance.to_string()),
            ("max_iterations", self.pagerank.max_iterations.to_string()),
            ("pagerank_weighting", self.pagerank.weighting.name().to_string()),
            ("hits_tolerance", self.hits.tolerance.to_string()),
            ("hits_max_iterations", self.hits.max_iterations.to_string()),
            ("ingest_mode", self.ingest_mode.name().to_string()),
            ("r_min", self.r_min.to_string()),
            ("reuse_parts", self.reuse_parts.to_string()),
        ]
    }
}

/// Partially specified configuration, from a `key=value` file or flags.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigOverrides {
    pub blocks_dir: Option<PathBuf>,
    pub edges_file: Option<PathBuf>,
    pub out_dir: Option<PathBuf>,
    pub price_file: Option<PathBuf>,
    pub difficulty_file: Option<PathBuf>,
    pub p_value: Option<f64>,
    pub seed: Option<u64>,
    pub grid_step_days: Option<u32>,
    pub damping: Option<f64>,
    pub tolerance: Option<f64>,
    pub max_iterations: Option<usize>,
    pub pagerank_weighting: Option<EdgeWeighting>,
    pub hits_tolerance: Option<f64>,
    pub hits_max_iterations: Option<usize>,
    pub ingest_mode: Option<IngestMode>,
    pub r_min: Option<u64>,
    pub reuse_parts: Option<usize>,
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value {value:?} for {key}"))
}

impl ConfigOverrides {
    /// Parses a config file: one `key = value` per line, `#` starts a
    /// comment, blank lines are ignored. Relative paths are resolved
    /// against `base`.
    pub fn parse_kv(text: &str, base: Option<&Path>) -> Result<Self, PipelineError> {
        let mut out = ConfigOverrides::default();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let usage = |msg: String| PipelineError::Usage(format!("config line {}: {msg}", i + 1));
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| usage(format!("expected key=value, found {line:?}")))?;
            let (key, value) = (key.trim(), value.trim());
            let value = match (base, key.ends_with("_dir") || key.ends_with("_file")) {
                (Some(base), true) if !value.is_empty() && Path::new(value).is_relative() => {
                    base.join(value).display().to_string()
                }
                _ => value.to_string(),
            };
            out.set(key, &value).map_err(usage)?;
        }
        Ok(out)
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            PipelineError::Usage(format!("cannot read config {}: {e}", path.display()))
        })?;
        Self::parse_kv(&text, path.parent())
    }

    /// Sets one key. An empty value clears it.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let path = || (!value.is_empty()).then(|| PathBuf::from(value));
        macro_rules! num {
            ($field:ident) => {
                self.$field = if value.is_empty() {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            };
        }
        match key {
            "blocks_dir" => self.blocks_dir = path(),
            "edges_file" => self.edges_file = path(),
            "out_dir" => self.out_dir = path(),
            "price_file" => self.price_file = path(),
            "difficulty_file" => self.difficulty_file = path(),
            "p_value" => num!(p_value),
            "seed" => num!(seed),
            "grid_step_days" => num!(grid_step_days),
            "damping" => num!(damping),
            "tolerance" => num!(tolerance),
            "max_iterations" => num!(max_iterations),
            "pagerank_weighting" => num!(pagerank_weighting),
            "hits_tolerance" => num!(hits_tolerance),
            "hits_max_iterations" => num!(hits_max_iterations),
            "ingest_mode" => num!(ingest_mode),
            "r_min" => num!(r_min),
            "reuse_parts" => num!(reuse_parts),
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Fields set in `over` replace those in `self`.
    pub fn merge(self, over: ConfigOverrides) -> ConfigOverrides {
        macro_rules! pick {
            ($($f:ident),*) => {
                ConfigOverrides { $($f: over.$f.or(self.$f)),* }
            };
        }
        let input_override = (over.blocks_dir.is_some() || over.edges_file.is_some())
            .then(|| (over.blocks_dir.clone(), over.edges_file.clone()));
        let mut merged = pick!(
            blocks_dir, edges_file, out_dir, price_file, difficulty_file, p_value, seed,
            grid_step_days, damping, tolerance, max_iterations, pagerank_weighting,
            hits_tolerance, hits_max_iterations, ingest_mode, r_min, reuse_parts
        );
        // An input chosen by the overriding layer replaces the other kind.
        if let Some((blocks_dir, edges_file)) = input_override {
            merged.blocks_dir = blocks_dir;
            merged.edges_file = edges_file;
        }
        merged
    }

    /// Applies defaults and validates.
    pub fn build(self) -> Result<PipelineConfig, PipelineError> {
        let usage = |m: &str| Err(PipelineError::Usage(m.to_string()));
        let input = match (self.blocks_dir, self.edges_file) {
            (Some(d), None) => InputSource::Blocks(d),
            (None, Some(f)) => InputSource::EdgeList(f),
            (Some(_), Some(_)) => return usage("set only one of blocks_dir and edges_file"),
            (None, None) => return usage("one of blocks_dir or edges_file is required"),
        };
        let Some(out_dir) = self.out_dir else {
            return usage("out_dir is required");
        };
        let defaults = PageRankConfig::default();
        let hits_defaults = HitsConfig::default();
        let config = PipelineConfig {
            input,
            out_dir,
            price_file: self.price_file,
            difficulty_file: self.difficulty_file,
            p_value: self.p_value.unwrap_or(0.01),
            seed: self.seed.unwrap_or(0),
            grid_step_days: self.grid_step_days.unwrap_or(14),
            pagerank: PageRankConfig {
                damping: self.damping.unwrap_or(defaults.damping),
                tolerance: self.tolerance.unwrap_or(defaults.tolerance),
                max_iterations: self.max_iterations.unwrap_or(defaults.max_iterations),
                weighting: self.pagerank_weighting.unwrap_or(defaults.weighting),
            },
            hits: HitsConfig {
                tolerance: self.hits_tolerance.unwrap_or(hits_defaults.tolerance),
                max_iterations: self.hits_max_iterations.unwrap_or(hits_defaults.max_iterations),
            },
            ingest_mode: self.ingest_mode.unwrap_or_default(),
            r_min: self.r_min.unwrap_or(1),
            reuse_parts: self.reuse_parts.unwrap_or(3),
        };
        if !(config.p_value > 0.0 && config.p_value < 1.0) {
            return usage("p_value must lie in (0, 1)");
        }
        if config.grid_step_days == 0 {
            return usage("grid_step_days must be positive");
        }
        if !(config.pagerank.damping > 0.0 && config.pagerank.damping < 1.0) {
            return usage("damping must lie in (0, 1)");
        }
        if !(config.pagerank.tolerance > 0.0) || !(config.hits.tolerance > 0.0) {
            return usage("tolerances must be positive");
        }
        if config.r_min == 0 {
            return usage("r_min must be at least 1");
        }
        if config.reuse_parts == 0 {
            return usage("reuse_parts must be at least 1");
        }
        Ok(config)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ConfigOverrides {
            edges_file: Some("e.csv".into()),
            out_dir: Some("out".into()),
            ..Default::default()
        }
        .build()
        .unwrap();
        assert_eq!(c.input, InputSource::EdgeList("e.csv".into()));
        assert_eq!(c.p_value, 0.01);
        assert_eq!(c.grid_step_secs(), 14 * 86_400);
        assert_eq!(c.pagerank, PageRankConfig::default());
        assert_eq!(c.reuse_parts, 3);
    }

    #[test]
    fn file_then_flags() {
        let text = "# run\nedges_file = e.csv\nout_dir=out\np_value = 0.05 # looser\nseed=7\n\n";
        let file = ConfigOverrides::parse_kv(text, Some(Path::new("/data"))).unwrap();
        assert_eq!(file.edges_file, Some(PathBuf::from("/data/e.csv")));
        let flags = ConfigOverrides {
            seed: Some(9),
            blocks_dir: Some("/blocks".into()),
            ..Default::default()
        };
        let c = file.merge(flags).build().unwrap();
        assert_eq!(c.seed, 9);
        assert_eq!(c.p_value, 0.05);
        assert_eq!(c.input, InputSource::Blocks("/blocks".into()));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(ConfigOverrides::parse_kv("p_value=abc", None).is_err());
        assert!(ConfigOverrides::parse_kv("colour=red", None).is_err());
        assert!(ConfigOverrides::parse_kv("no equals sign", None).is_err());
        let both = ConfigOverrides {
            blocks_dir: Some("b".into()),
            edges_file: Some("e".into()),
            out_dir: Some("o".into()),
            ..Default::default()
        };
        assert!(both.build().is_err());
        let bad_p = ConfigOverrides::parse_kv("edges_file=e\nout_dir=o\np_value=1", None).unwrap();
        assert!(matches!(bad_p.build(), Err(PipelineError::Usage(_))));
    }

    #[test]
    fn echo_round_trips() {
        let c = ConfigOverrides::parse_kv(
            "blocks_dir=/b\nout_dir=/o\nseed=3\npagerank_weighting=value\ningest_mode=skip",
            None,
        )
        .unwrap()
        .build()
        .unwrap();
        let text: String = c.echo().iter().map(|(k, v)| format!("{k}={v}\n")).collect();
        assert_eq!(ConfigOverrides::parse_kv(&text, None).unwrap().build().unwrap(), c);
    }
}

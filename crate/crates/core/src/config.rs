//! Flat `key = value` run configurations and the spaces they describe.
//!
//! Lines are `key = value`; blank lines and lines starting with `#` are
//! ignored. Unknown keys and repeated keys are rejected. The resolved form
//! fills in every default, inlines distance tables read from files, and is
//! what reports embed, so a report can be reproduced from its own config.

use std::collections::BTreeMap;
use std::path::Path;

use crate::base::{BaseSpace, DEFAULT_GRID, DEFAULT_UNIVERSE};
use crate::cobweb::CobwebSpace;
use crate::error::{Error, Result};
use crate::extremal::ExtremalSpace;
use crate::hedgehog::HedgehogSpace;
use crate::invlimit::{Tower, DEFAULT_HEIGHT};
use crate::scalar::Scalar;
use crate::zcon::{default_eps, ZSpace};

pub const KINDS: &[&str] = &["unit", "cantor", "discrete", "hedgehog", "cobweb", "zcon", "extremal", "tower"];

const BASE_KINDS: &[&str] = &["unit", "cantor", "discrete"];
const DEFAULT_STEPS: u64 = 64;
const DEFAULT_SPIKES: u32 = 8;
const DEFAULT_VORTICES: u32 = 6;

/// Keys accepted by every kind.
const COMMON_KEYS: &[&str] = &["kind", "seed", "audit", "samples"];

fn base_keys(kind: &str) -> &'static [&'static str] {
    match kind {
        "unit" => &["grid"],
        "cantor" => &["universe"],
        "discrete" => &["table", "table_file", "labels", "validate"],
        _ => &[],
    }
}

fn kind_keys(kind: &str) -> Vec<String> {
    let own: &[&str] = match kind {
        "unit" | "cantor" | "discrete" => base_keys(kind),
        "hedgehog" => &["spikes", "eps", "steps"],
        "cobweb" => &["vortices", "eps", "steps"],
        "zcon" | "tower" => &["base", "eps", "steps", "height"],
        "extremal" => &["grid", "eps", "steps"],
        _ => &[],
    };
    let mut keys: Vec<String> = COMMON_KEYS.iter().chain(own).map(|k| k.to_string()).collect();
    if kind == "zcon" {
        keys.retain(|k| k != "height");
    }
    if kind == "zcon" || kind == "tower" {
        for b in BASE_KINDS {
            keys.extend(base_keys(b).iter().map(|k| format!("base.{k}")));
        }
    }
    keys
}

/// A run configuration: the raw entries as given, before defaults.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RunConfig {
    entries: BTreeMap<String, String>,
}

/// A constructed space of any supported kind.
#[derive(Debug, Clone)]
pub enum SpaceSpec {
    Base(BaseSpace),
    Hedgehog(HedgehogSpace),
    Cobweb(CobwebSpace<u32>),
    Zcon(ZSpace<BaseSpace>),
    Extremal(ExtremalSpace),
    Tower(Tower),
}

impl RunConfig {
    pub fn new() -> Self {
        RunConfig::default()
    }

    /// Parses configuration text. Keys are checked once the kind is known.
    pub fn parse(text: &str) -> Result<Self> {
        let mut config = RunConfig::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key = value, got {line:?}", n + 1)))?;
            let key = key.trim();
            if config.entries.contains_key(key) {
                return Err(Error::Config(format!("line {}: key {key:?} given twice", n + 1)));
            }
            config.entries.insert(key.to_string(), value.trim().to_string());
        }
        config.check_keys()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Sets a key, overriding any earlier value.
    pub fn set(&mut self, key: &str, value: impl Into<String>) -> Result<()> {
        self.entries.insert(key.to_string(), value.into());
        self.check_keys()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn kind(&self) -> Result<&str> {
        self.get("kind")
            .ok_or_else(|| Error::Config("no space kind given (set kind or pass --space)".into()))
    }

    fn check_keys(&self) -> Result<()> {
        let Some(kind) = self.get("kind") else {
            return Ok(());
        };
        if !KINDS.contains(&kind) {
            return Err(Error::Config(format!("unknown space kind {kind:?}; expected one of {}", KINDS.join(", "))));
        }
        let allowed = kind_keys(kind);
        for key in self.entries.keys() {
            if !allowed.iter().any(|k| k == key) {
                return Err(Error::Config(format!("unknown key {key:?} for kind {kind}")));
            }
        }
        Ok(())
    }

    pub fn seed(&self) -> Result<Option<u64>> {
        self.get("seed")
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("seed must be a 64-bit unsigned integer, got {s:?}"))))
            .transpose()
    }

    pub fn samples(&self) -> Result<Option<u64>> {
        self.get("samples")
            .map(|s| s.parse().map_err(|_| Error::Parse(format!("samples must be a nonnegative integer, got {s:?}"))))
            .transpose()
    }

    /// Every key relevant to the kind, with defaults filled in and table
    /// files inlined.
    pub fn resolved(&self) -> Result<BTreeMap<String, String>> {
        self.check_keys()?;
        let kind = self.kind()?.to_string();
        let mut out: BTreeMap<String, String> = self
            .entries
            .iter()
            .filter(|(k, _)| !k.ends_with("table_file"))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        let mut default = |key: &str, value: String| {
            out.entry(key.to_string()).or_insert(value);
        };
        default("seed", "0".into());
        match kind.as_str() {
            "unit" | "cantor" | "discrete" => self.resolve_base(&kind, "", &mut out)?,
            "hedgehog" => {
                default("spikes", DEFAULT_SPIKES.to_string());
                default("eps", default_eps().to_string());
                default("steps", DEFAULT_STEPS.to_string());
            }
            "cobweb" => {
                default("vortices", DEFAULT_VORTICES.to_string());
                default("eps", default_eps().to_string());
                default("steps", DEFAULT_STEPS.to_string());
            }
            "extremal" => {
                default("grid", DEFAULT_GRID.to_string());
                default("eps", Scalar::one().to_string());
                default("steps", DEFAULT_STEPS.to_string());
            }
            _ => {
                default("base", "unit".into());
                default("eps", default_eps().to_string());
                default("steps", DEFAULT_STEPS.to_string());
                if kind == "tower" {
                    default("height", DEFAULT_HEIGHT.to_string());
                }
                let base = out["base"].clone();
                if !BASE_KINDS.contains(&base.as_str()) {
                    return Err(Error::Config(format!("base must be unit, cantor or discrete, got {base:?}")));
                }
                for key in out.keys() {
                    if let Some(sub) = key.strip_prefix("base.") {
                        if !base_keys(&base).contains(&sub) {
                            return Err(Error::Config(format!("key {key:?} does not apply to a {base} base")));
                        }
                    }
                }
                for sub in ["table_file"] {
                    if self.get(&format!("base.{sub}")).is_some() && !base_keys(&base).contains(&sub) {
                        return Err(Error::Config(format!("key base.{sub} does not apply to a {base} base")));
                    }
                }
                self.resolve_base(&base, "base.", &mut out)?;
            }
        }
        Ok(out)
    }

    fn resolve_base(&self, base: &str, prefix: &str, out: &mut BTreeMap<String, String>) -> Result<()> {
        let key = |k: &str| format!("{prefix}{k}");
        match base {
            "unit" => {
                out.entry(key("grid")).or_insert_with(|| DEFAULT_GRID.to_string());
            }
            "cantor" => {
                out.entry(key("universe")).or_insert_with(|| DEFAULT_UNIVERSE.to_string());
            }
            _ => {
                let inline = self.get(&key("table"));
                let file = self.get(&key("table_file"));
                let table = match (inline, file) {
                    (Some(_), Some(_)) => {
                        return Err(Error::Config(format!("give only one of {} and {}", key("table"), key("table_file"))))
                    }
                    (Some(t), None) => parse_table(t)?,
                    (None, Some(path)) => read_table(Path::new(path))?,
                    (None, None) => {
                        return Err(Error::Config(format!("a discrete space needs {} or {}", key("table"), key("table_file"))))
                    }
                };
                out.insert(key("table"), format_table(&table));
                out.entry(key("validate")).or_insert_with(|| "true".into());
            }
        }
        Ok(())
    }

    /// Builds the configured space.
    pub fn build(&self) -> Result<SpaceSpec> {
        let r = self.resolved()?;
        let kind = r["kind"].as_str();
        let steps = parse_num::<u64>(&r, "steps").unwrap_or(Ok(DEFAULT_STEPS))?;
        Ok(match kind {
            "unit" | "cantor" | "discrete" => SpaceSpec::Base(build_base(kind, "", &r)?),
            "hedgehog" => SpaceSpec::Hedgehog(
                HedgehogSpace::new(parse_num(&r, "spikes").expect("defaulted")?, parse_scalar(&r, "eps")?)?
                    .with_steps(steps),
            ),
            "cobweb" => {
                let n: u32 = parse_num(&r, "vortices").expect("defaulted")?;
                SpaceSpec::Cobweb(CobwebSpace::new((0..n).collect(), parse_scalar(&r, "eps")?)?.with_steps(steps))
            }
            "extremal" => {
                if parse_scalar(&r, "eps")? != Scalar::one() {
                    return Err(Error::Config("the extremal space has thread length 1; eps must be 1".into()));
                }
                SpaceSpec::Extremal(ExtremalSpace::new(parse_num(&r, "grid").expect("defaulted")?).with_steps(steps))
            }
            "zcon" => {
                let base = build_base(&r["base"], "base.", &r)?;
                SpaceSpec::Zcon(ZSpace::new(base, parse_scalar(&r, "eps")?)?.with_steps(steps))
            }
            _ => {
                let base = build_base(&r["base"], "base.", &r)?;
                let height = parse_num(&r, "height").expect("defaulted")?;
                SpaceSpec::Tower(Tower::new(base, height, parse_scalar(&r, "eps")?)?.with_steps(steps))
            }
        })
    }
}

fn parse_num<T: std::str::FromStr>(r: &BTreeMap<String, String>, key: &str) -> Option<Result<T>> {
    r.get(key).map(|v| {
        v.parse()
            .map_err(|_| Error::Parse(format!("{key} must be a nonnegative integer, got {v:?}")))
    })
}

fn parse_scalar(r: &BTreeMap<String, String>, key: &str) -> Result<Scalar> {
    r[key].parse()
}

fn build_base(kind: &str, prefix: &str, r: &BTreeMap<String, String>) -> Result<BaseSpace> {
    let key = |k: &str| format!("{prefix}{k}");
    match kind {
        "unit" => {
            let grid: u64 = parse_num(r, &key("grid")).expect("defaulted")?;
            if grid == 0 {
                return Err(Error::Config("grid must be positive".into()));
            }
            Ok(BaseSpace::UnitInterval { grid })
        }
        "cantor" => {
            let universe: u32 = parse_num(r, &key("universe")).expect("defaulted")?;
            if universe == 0 {
                return Err(Error::Config("universe must be positive".into()));
            }
            Ok(BaseSpace::Cantor { universe })
        }
        _ => {
            let table = parse_table(&r[&key("table")])?;
            let validate = match r[&key("validate")].as_str() {
                "true" => true,
                "false" => false,
                other => return Err(Error::Parse(format!("validate must be true or false, got {other:?}"))),
            };
            let space = if validate {
                BaseSpace::discrete(table)?
            } else {
                BaseSpace::discrete_unchecked(table)?
            };
            match r.get(&key("labels")) {
                Some(labels) => space.with_labels(labels.split(',').map(|l| l.trim().to_string()).collect()),
                None => Ok(space),
            }
        }
    }
}

/// Parses an inline table: rows separated by `;`, entries by `,`.
pub fn parse_table(text: &str) -> Result<Vec<Vec<Scalar>>> {
    text.split(';')
        .map(|row| row.split(',').map(|x| x.trim().parse()).collect())
        .collect()
}

pub fn format_table(table: &[Vec<Scalar>]) -> String {
    table
        .iter()
        .map(|row| row.iter().map(Scalar::to_string).collect::<Vec<_>>().join(","))
        .collect::<Vec<_>>()
        .join(";")
}

/// Reads a CSV distance table without a header row.
pub fn read_table(path: &Path) -> Result<Vec<Vec<Scalar>>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    let mut table = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
        table.push(record.iter().map(str::parse).collect::<Result<Vec<Scalar>>>()?);
    }
    Ok(table)
}

impl SpaceSpec {
    pub fn describe(&self) -> String {
        use crate::space::MetricSpace;
        match self {
            SpaceSpec::Base(s) => s.describe(),
            SpaceSpec::Hedgehog(s) => s.describe(),
            SpaceSpec::Cobweb(s) => s.describe(),
            SpaceSpec::Zcon(s) => s.describe(),
            SpaceSpec::Extremal(s) => s.describe(),
            SpaceSpec::Tower(s) => s.describe(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_resolved() {
        let c = RunConfig::parse("kind = tower\n").unwrap();
        let r = c.resolved().unwrap();
        assert_eq!(r["seed"], "0");
        assert_eq!(r["height"], "3");
        assert_eq!(r["eps"], "2/1");
        assert_eq!(r["base"], "unit");
        assert_eq!(r["base.grid"], "65536");
        let e = RunConfig::parse("kind = extremal").unwrap().resolved().unwrap();
        assert_eq!(e["eps"], "1/1");
    }

    #[test]
    fn unknown_and_repeated_keys_are_rejected() {
        assert!(matches!(RunConfig::parse("kind = hedgehog\nvortices = 3"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("kind = cobweb\neps = 1\neps = 2"), Err(Error::Config(_))));
        assert!(matches!(RunConfig::parse("kind = blob"), Err(Error::Config(_))));
        assert!(RunConfig::parse("just text").unwrap_err().is_parse());
        let c = RunConfig::parse("kind = zcon\nbase = cantor\nbase.grid = 8").unwrap();
        assert!(c.build().is_err());
    }

    #[test]
    fn resolved_config_rebuilds_the_same_space() {
        let c = RunConfig::parse("# comment\nkind = zcon\nbase = discrete\nbase.table = 0,1;1,0\neps = 3/2\n").unwrap();
        let r = c.resolved().unwrap();
        let mut again = RunConfig::new();
        for (k, v) in &r {
            again.set(k, v.clone()).unwrap();
        }
        assert_eq!(again.resolved().unwrap(), r);
        assert!(matches!(again.build().unwrap(), SpaceSpec::Zcon(_)));
    }

    #[test]
    fn table_files_are_inlined() {
        let dir = std::env::temp_dir().join(format!("exotic-table-{}", std::process::id()));
        std::fs::write(&dir, "0, 1/2, 1\n1/2, 0, 1/2\n1, 1/2, 0\n").unwrap();
        let mut c = RunConfig::new();
        c.set("kind", "discrete").unwrap();
        c.set("table_file", dir.display().to_string()).unwrap();
        let r = c.resolved().unwrap();
        std::fs::remove_file(&dir).unwrap();
        assert_eq!(r["table"], "0/1,1/2,1/1;1/2,0/1,1/2;1/1,1/2,0/1");
        assert!(!r.contains_key("table_file"));
    }

    #[test]
    fn corrupted_tables_need_validation_off() {
        let text = "kind = discrete\ntable = 0,1,3;1,0,1;3,1,0";
        assert!(matches!(RunConfig::parse(text).unwrap().build(), Err(Error::NotAMetric(_))));
        let off = format!("{text}\nvalidate = false");
        assert!(RunConfig::parse(&off).unwrap().build().is_ok());
    }

    #[test]
    fn extremal_eps_is_fixed() {
        assert!(RunConfig::parse("kind = extremal\neps = 2").unwrap().build().is_err());
    }
}

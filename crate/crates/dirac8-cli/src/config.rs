//! The single structured run configuration: TOML on disk, every field with
//! a documented default, resolved form echoed beside the outputs.
//!
//! The full schema with defaults is documented in `docs/config.md`.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use dirac8::classify::RepLabel;
use dirac8::evolve::EvolutionModel;
use dirac8::projector::ProjectorSpec;
use dirac8::symmetry::SearchOptions;

use crate::error::{CliError, Result};

/// The four run modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Verify,
    Classify,
    Evolve,
    Symmetries,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Verify => "verify",
            Command::Classify => "classify",
            Command::Evolve => "evolve",
            Command::Symmetries => "symmetries",
        }
    }
}

/// Spatial grid parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    /// Spatial dimensions (1, 2, or 3).
    pub dims: usize,
    /// Points per axis (power of two).
    pub n: usize,
    /// Box length per axis.
    pub l: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            dims: 1,
            n: 256,
            l: 40.0,
        }
    }
}

/// Initial Gaussian packet parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PacketConfig {
    /// Packet center.
    pub center: [f64; 3],
    /// Gaussian width (resolution preconditions: 4Δx ≤ width ≤ L/8).
    pub width: f64,
    /// Carrier momentum.
    pub momentum: [f64; 3],
    /// Optional sector projection: one of "Dp_s0", "Dm_s0", "Dp_0s",
    /// "Dm_0s", or "" for an unprojected packet.
    pub sector: String,
}

impl Default for PacketConfig {
    fn default() -> Self {
        PacketConfig {
            center: [0.0, 0.0, 0.0],
            width: 2.0,
            momentum: [0.8, 0.0, 0.0],
            sector: String::new(),
        }
    }
}

/// Time-evolution parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvolutionConfig {
    /// "DIRAC8" (full 8-component propagator) or "SQRT_E" (square-root
    /// Hamiltonian).
    pub model: String,
    /// Time step (may be negative for reverse evolution).
    pub dt: f64,
    /// Number of steps.
    pub steps: usize,
    /// Optional projector constraint applied to the initial data: one of
    /// "P1+", "P1-", "P2+", "P2-", "P3+", "P3-", or "" for none.
    pub precondition: String,
    /// Also write the final field snapshot (`snapshot.json`).
    pub snapshot_final: bool,
    pub packet: PacketConfig,
}

impl Default for EvolutionConfig {
    fn default() -> Self {
        EvolutionConfig {
            model: "DIRAC8".to_string(),
            dt: 0.01,
            steps: 1000,
            precondition: String::new(),
            snapshot_final: false,
            packet: PacketConfig::default(),
        }
    }
}

/// Momentum samples for `classify` and `symmetries`: explicit values, or a
/// seeded draw when `values` is empty.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MomentaConfig {
    /// Number of seeded samples (ignored when `values` is nonempty).
    pub count: usize,
    /// Component scale of the seeded draw.
    pub scale: f64,
    /// Explicit momentum list; empty means "draw `count` samples".
    pub values: Vec<[f64; 3]>,
}

impl Default for MomentaConfig {
    fn default() -> Self {
        MomentaConfig {
            count: 10,
            scale: 2.0,
            values: Vec::new(),
        }
    }
}

/// Output destination and formats.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    /// Output directory; the `--out` flag overrides it.  Omitted from the
    /// resolved-config echo so reruns into other directories reproduce the
    /// echo byte-identically.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<String>,
    /// Subset of {"json", "csv"}.
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: None,
            formats: vec!["json".to_string(), "csv".to_string()],
        }
    }
}

/// Monomial search-space restrictions for `symmetries`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SymmetriesConfig {
    /// Restrict the search to even-length monomials.
    pub even_only: bool,
    /// Bitmask of allowed Γ factors (bit A ⟺ Γ_A permitted); 127 = all.
    pub allowed_mask: u8,
}

impl Default for SymmetriesConfig {
    fn default() -> Self {
        SymmetriesConfig {
            even_only: false,
            allowed_mask: 0x7F,
        }
    }
}

/// The complete run configuration.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Which run mode to execute (a positional CLI argument overrides it).
    pub command: Command,
    /// Mass parameter (m > 0).
    pub mass: f64,
    /// Seed for every random draw (< 2^63, TOML integer range).
    pub seed: u64,
    pub grid: GridConfig,
    pub evolution: EvolutionConfig,
    pub momenta: MomentaConfig,
    pub output: OutputConfig,
    pub symmetries: SymmetriesConfig,
    /// Per-check tolerance overrides for `verify`, by exact check name.
    pub tolerances: BTreeMap<String, f64>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Verify,
            mass: 1.0,
            seed: 7,
            grid: GridConfig::default(),
            evolution: EvolutionConfig::default(),
            momenta: MomentaConfig::default(),
            output: OutputConfig::default(),
            symmetries: SymmetriesConfig::default(),
            tolerances: BTreeMap::new(),
        }
    }
}

impl RunConfig {
    /// Parse a TOML document, applying `--set` overrides before
    /// deserialization.
    pub fn from_toml(text: &str, overrides: &[(String, String)]) -> Result<Self> {
        let mut table: toml::Table = text
            .parse()
            .map_err(|e| CliError::Config(format!("config is not valid TOML: {e}")))?;
        for (key, value) in overrides {
            apply_override(&mut table, key, value)?;
        }
        let cfg: RunConfig = toml::Value::Table(table)
            .try_into()
            .map_err(|e| CliError::Config(format!("config does not match the schema: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path, overrides: &[(String, String)]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::io(path.display().to_string(), e))?;
        Self::from_toml(&text, overrides)
    }

    /// Structural validation beyond what serde enforces.
    pub fn validate(&self) -> Result<()> {
        if self.mass <= 0.0 {
            return Err(CliError::Config(format!(
                "mass must satisfy m > 0 (got {}); the equations are built for positive mass",
                self.mass
            )));
        }
        dirac8::Grid::<f64>::new(self.grid.dims, self.grid.n, self.grid.l)
            .map_err(|e| CliError::Config(format!("grid: {e}")))?;
        self.model()?;
        self.precondition()?;
        self.packet_sector()?;
        if self.output.formats.is_empty() {
            return Err(CliError::Config(
                "output.formats must contain at least one of \"json\", \"csv\"".to_string(),
            ));
        }
        for f in &self.output.formats {
            if f != "json" && f != "csv" {
                return Err(CliError::Config(format!(
                    "unknown output format {f:?} (expected \"json\" or \"csv\")"
                )));
            }
        }
        if !self.evolution.dt.is_finite() {
            return Err(CliError::Config(format!(
                "evolution.dt must be finite (got {})",
                self.evolution.dt
            )));
        }
        if self.symmetries.allowed_mask > 0x7F {
            return Err(CliError::Config(format!(
                "symmetries.allowed_mask must be ≤ 127 (got {})",
                self.symmetries.allowed_mask
            )));
        }
        Ok(())
    }

    pub fn model(&self) -> Result<EvolutionModel> {
        EvolutionModel::from_str(&self.evolution.model)
            .map_err(|e| CliError::Config(format!("evolution.model: {e}")))
    }

    /// The optional evolution precondition, parsed from strings like "P3+".
    pub fn precondition(&self) -> Result<Option<ProjectorSpec>> {
        parse_projector_spec(&self.evolution.precondition)
            .map_err(|e| CliError::Config(format!("evolution.precondition: {e}")))
    }

    /// The optional packet sector, parsed from the short label names.
    pub fn packet_sector(&self) -> Result<Option<RepLabel>> {
        parse_sector(&self.evolution.packet.sector)
            .map_err(|e| CliError::Config(format!("evolution.packet.sector: {e}")))
    }

    pub fn search_options(&self) -> SearchOptions {
        SearchOptions {
            allowed_mask: self.symmetries.allowed_mask,
            even_only: self.symmetries.even_only,
        }
    }

    /// The momentum list: explicit values, or the seeded draw.
    pub fn resolve_momenta(&self) -> Result<Vec<[f64; 3]>> {
        let values = if self.momenta.values.is_empty() {
            dirac8::sampling::momenta::<f64>(self.seed, self.momenta.count, self.momenta.scale)
        } else {
            self.momenta.values.clone()
        };
        if values.is_empty() {
            return Err(CliError::Config(
                "momentum list is empty: set momenta.count > 0 or provide momenta.values"
                    .to_string(),
            ));
        }
        Ok(values)
    }

    pub fn wants(&self, format: &str) -> bool {
        self.output.formats.iter().any(|f| f == format)
    }

    /// The resolved-config echo: every default applied, output directory
    /// omitted so reruns into other directories stay byte-identical.
    pub fn resolved_toml(&self) -> String {
        let mut echo = self.clone();
        echo.output.directory = None;
        toml::to_string_pretty(&echo).expect("config serializes")
    }
}

/// Parse "P<kind><sign>" (e.g. "P3+") into a projector spec; "" means none.
pub fn parse_projector_spec(text: &str) -> std::result::Result<Option<ProjectorSpec>, String> {
    if text.is_empty() {
        return Ok(None);
    }
    let err = || {
        format!(
            "expected \"\" or one of P1+, P1-, P2+, P2-, P3+, P3- (got {text:?})"
        )
    };
    let mut chars = text.chars();
    if chars.next() != Some('P') {
        return Err(err());
    }
    let kind = chars.next().and_then(|c| c.to_digit(10)).ok_or_else(err)? as u8;
    let sign = match chars.next() {
        Some('+') => 1,
        Some('-') => -1,
        _ => return Err(err()),
    };
    if chars.next().is_some() {
        return Err(err());
    }
    ProjectorSpec::new(kind, sign).map(Some).map_err(|e| e.to_string())
}

/// Parse a sector short name ("Dp_s0", …); "" means none.
pub fn parse_sector(text: &str) -> std::result::Result<Option<RepLabel>, String> {
    if text.is_empty() {
        return Ok(None);
    }
    for label in RepLabel::ALL {
        if text == label.short() {
            return Ok(Some(label));
        }
    }
    Err(format!(
        "expected \"\" or one of Dp_s0, Dm_s0, Dp_0s, Dm_0s (got {text:?})"
    ))
}

/// Apply one `--set key=value` override onto the parsed TOML table.
///
/// The key is a dotted path into the document, except that everything
/// after a leading `tolerances.` is taken verbatim as the check name
/// (check names themselves contain dots).
fn apply_override(table: &mut toml::Table, key: &str, value: &str) -> Result<()> {
    let parsed: toml::Value = {
        let doc = format!("v = {value}");
        match doc.parse::<toml::Table>() {
            Ok(mut t) => t.remove("v").expect("assigned key"),
            Err(_) => toml::Value::String(value.to_string()),
        }
    };
    let segments: Vec<&str> = if let Some(name) = key.strip_prefix("tolerances.") {
        vec!["tolerances", name]
    } else {
        key.split('.').collect()
    };
    if segments.iter().any(|s| s.is_empty()) {
        return Err(CliError::Config(format!("invalid override key {key:?}")));
    }
    let mut current = table;
    for segment in &segments[..segments.len() - 1] {
        current = current
            .entry(segment.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()))
            .as_table_mut()
            .ok_or_else(|| {
                CliError::Config(format!(
                    "override key {key:?} descends into a non-table value at {segment:?}"
                ))
            })?;
    }
    current.insert(segments[segments.len() - 1].to_string(), parsed);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_resolves_to_documented_defaults() {
        let cfg = RunConfig::from_toml("", &[]).unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.command, Command::Verify);
        assert_eq!(cfg.mass, 1.0);
        assert_eq!(cfg.seed, 7);
        assert_eq!((cfg.grid.dims, cfg.grid.n, cfg.grid.l), (1, 256, 40.0));
        assert_eq!(cfg.evolution.model, "DIRAC8");
        assert_eq!(cfg.evolution.steps, 1000);
        assert_eq!(cfg.output.formats, ["json", "csv"]);
    }

    #[test]
    fn resolved_echo_reparses_to_the_same_config() {
        let cfg = RunConfig::from_toml(
            "command = \"evolve\"\nmass = 1.5\n[evolution]\nsteps = 12\n",
            &[],
        )
        .unwrap();
        let echo = cfg.resolved_toml();
        let back = RunConfig::from_toml(&echo, &[]).unwrap();
        assert_eq!(cfg, back);
        assert_eq!(echo, back.resolved_toml(), "resolution is idempotent");
        assert!(!echo.contains("directory"), "output dir must not be echoed");
    }

    #[test]
    fn nonpositive_mass_is_named_in_the_error() {
        let err = RunConfig::from_toml("mass = 0.0", &[]).unwrap_err();
        assert!(err.to_string().contains("m > 0"), "{err}");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let err = RunConfig::from_toml("massive = 2.0", &[]).unwrap_err();
        assert!(err.to_string().contains("schema"), "{err}");
    }

    #[test]
    fn overrides_reach_nested_fields_and_tolerance_names() {
        let overrides = vec![
            ("mass".to_string(), "2.5".to_string()),
            ("grid.n".to_string(), "64".to_string()),
            ("evolution.model".to_string(), "\"SQRT_E\"".to_string()),
            ("evolution.packet.sector".to_string(), "Dp_s0".to_string()),
            (
                "tolerances.poincare.h_squared".to_string(),
                "1e-20".to_string(),
            ),
        ];
        let cfg = RunConfig::from_toml("", &overrides).unwrap();
        assert_eq!(cfg.mass, 2.5);
        assert_eq!(cfg.grid.n, 64);
        assert_eq!(cfg.evolution.model, "SQRT_E");
        assert_eq!(cfg.evolution.packet.sector, "Dp_s0");
        assert_eq!(cfg.tolerances["poincare.h_squared"], 1e-20);
    }

    #[test]
    fn spec_strings_parse_and_reject() {
        assert_eq!(parse_projector_spec("").unwrap(), None);
        let spec = parse_projector_spec("P3+").unwrap().unwrap();
        assert_eq!((spec.kind, spec.sign), (3, 1));
        let spec = parse_projector_spec("P1-").unwrap().unwrap();
        assert_eq!((spec.kind, spec.sign), (1, -1));
        assert!(parse_projector_spec("P4+").is_err());
        assert!(parse_projector_spec("3+").is_err());
        assert_eq!(parse_sector("").unwrap(), None);
        assert_eq!(parse_sector("Dm_0s").unwrap(), Some(RepLabel::DMinus0S));
        assert!(parse_sector("D+(s,0)").is_err());
    }

    #[test]
    fn explicit_momenta_win_over_the_seeded_draw() {
        let cfg =
            RunConfig::from_toml("[momenta]\nvalues = [[0.1, -0.2, 0.3]]", &[]).unwrap();
        assert_eq!(cfg.resolve_momenta().unwrap(), vec![[0.1, -0.2, 0.3]]);
        let cfg = RunConfig::from_toml("[momenta]\ncount = 4", &[]).unwrap();
        let drawn = cfg.resolve_momenta().unwrap();
        assert_eq!(drawn.len(), 4);
        assert_eq!(drawn, cfg.resolve_momenta().unwrap(), "seeded draw repeats");
        let cfg = RunConfig::from_toml("[momenta]\ncount = 0", &[]).unwrap();
        assert!(cfg.resolve_momenta().is_err());
    }

    #[test]
    fn bad_grid_and_formats_are_config_errors() {
        assert!(RunConfig::from_toml("[grid]\nn = 100", &[]).is_err());
        assert!(RunConfig::from_toml("[grid]\ndims = 4", &[]).is_err());
        assert!(RunConfig::from_toml("[output]\nformats = [\"yaml\"]", &[]).is_err());
        assert!(RunConfig::from_toml("[output]\nformats = []", &[]).is_err());
        assert!(RunConfig::from_toml("[evolution]\nmodel = \"EULER\"", &[]).is_err());
        assert!(RunConfig::from_toml("[evolution]\nprecondition = \"P9+\"", &[]).is_err());
    }
}

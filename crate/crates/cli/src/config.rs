//! Job configuration: a single JSON document selects the command and carries
//! every input it needs. Complex numbers are two-element `[re, im]` arrays
//! throughout.

use anyhow::{bail, Context, Result};
use serde::Deserialize;

use gharmonics::algebra::OperatorElement;
use gharmonics::solutions::ModeCoefficient;
use gharmonics::verification::GridSpec;
use gharmonics::{EvalConfig, Params};

pub const SCHEMA: &str = "gharmonics/1";

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Eval,
    Synth,
    Decompose,
    Verify,
    Limit,
    Algebra,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Deserialize, PartialEq, Eq)]
#[serde(rename_all = "lowercase")]
pub enum AlgebraOp {
    Bracket,
    Lambda,
    Kernel,
    Equivalent,
    Rescale,
}

#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleSection {
    pub rho: f64,
    pub n: usize,
}

/// Grid section as it appears in config JSON; the origin exclusion defaults
/// to twice the finite-difference step when omitted.
#[derive(Clone, Copy, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSection {
    pub radius: f64,
    pub n: usize,
    pub exclude_origin_radius: Option<f64>,
}

impl GridSection {
    pub fn to_spec(self, fd_step: f64) -> gharmonics::Result<GridSpec> {
        GridSpec::new(
            self.radius,
            self.n,
            self.exclude_origin_radius.unwrap_or(2.0 * fd_step),
        )
    }
}

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IoSection {
    pub input: Option<String>,
    pub output: Option<String>,
    pub format: Option<Format>,
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JobConfig {
    pub schema: String,
    pub command: Command,
    pub params: Params,
    #[serde(default)]
    pub eval: Option<EvalConfig>,
    pub grid: Option<GridSection>,
    pub modes: Option<Vec<ModeCoefficient>>,
    pub circle: Option<CircleSection>,
    /// Inclusive mode range `[lo, hi]` for `decompose`.
    pub m_range: Option<[i32; 2]>,
    /// Mode indices tabulated by `limit`.
    pub m_values: Option<Vec<u32>>,
    /// Disc radius for `limit` (default 1.0).
    pub limit_radius: Option<f64>,
    /// Grid density for `limit` (default 21).
    pub n_grid: Option<usize>,
    /// Mode index used by `eval` (default 0).
    pub mode_index: Option<u32>,
    /// Explicit evaluation points for `eval`.
    pub points: Option<Vec<[f64; 2]>>,
    /// Residual threshold for `verify` (default 1e-4).
    pub threshold: Option<f64>,
    /// Operator-algebra query selector.
    pub op: Option<AlgebraOp>,
    /// Operands for `algebra` queries.
    pub elements: Option<Vec<OperatorElement>>,
    /// Mode index for `algebra` lambda/kernel/equivalent queries.
    pub m: Option<u32>,
    /// Dilation factor for `algebra` rescale.
    pub rho: Option<f64>,
    #[serde(default)]
    pub io: IoSection,
}

impl JobConfig {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let config: JobConfig = serde_json::from_str(&text).context("parsing config JSON")?;
        if config.schema != SCHEMA {
            bail!(
                "unsupported schema {:?}, expected {SCHEMA:?}",
                config.schema
            );
        }
        Ok(config)
    }

    /// Per-command presence checks, so missing sections fail before any
    /// computation starts.
    pub fn validate(&self) -> Result<()> {
        // Sections deserialized structurally still owe their value
        // invariants to the library constructors.
        if let Some(g) = self.grid {
            g.to_spec(1e-3)
                .map_err(|e| anyhow::anyhow!(e.to_string()))?;
        }
        if let Some(circle) = self.circle {
            if !(circle.rho > 0.0 && circle.rho < 1.0) {
                bail!("circle.rho must lie in (0,1), got {}", circle.rho);
            }
            if circle.n == 0 || !circle.n.is_power_of_two() {
                bail!("circle.n must be a power of two, got {}", circle.n);
            }
        }
        match self.command {
            Command::Eval => {
                if self.points.is_none() && self.grid.is_none() {
                    bail!("eval needs either `points` or `grid`");
                }
            }
            Command::Synth => {
                if self.modes.is_none() {
                    bail!("synth needs `modes`");
                }
                if self.circle.is_none() && self.grid.is_none() {
                    bail!("synth needs either `circle` or `grid`");
                }
            }
            Command::Decompose => {
                if self.io.input.is_none() {
                    bail!("decompose needs io.input (a circle sample CSV)");
                }
                if self.m_range.is_none() {
                    bail!("decompose needs `m_range`");
                }
            }
            Command::Verify => {
                if self.modes.is_none() {
                    bail!("verify needs `modes`");
                }
                if self.grid.is_none() {
                    bail!("verify needs `grid`");
                }
            }
            Command::Limit => {
                if self.m_values.as_ref().is_none_or(|v| v.is_empty()) {
                    bail!("limit needs a nonempty `m_values`");
                }
            }
            Command::Algebra => {
                let op = self.op.context("algebra needs `op`")?;
                let n_elems = self.elements.as_ref().map_or(0, |e| e.len());
                match op {
                    AlgebraOp::Bracket => {
                        if n_elems != 2 {
                            bail!("algebra bracket needs exactly 2 `elements`");
                        }
                    }
                    AlgebraOp::Lambda => {
                        if n_elems != 1 || self.m.is_none() {
                            bail!("algebra lambda needs 1 element and `m`");
                        }
                    }
                    AlgebraOp::Kernel => {
                        if self.m.is_none() {
                            bail!("algebra kernel needs `m`");
                        }
                    }
                    AlgebraOp::Equivalent => {
                        if n_elems != 2 || self.m.is_none() {
                            bail!("algebra equivalent needs 2 elements and `m`");
                        }
                    }
                    AlgebraOp::Rescale => {
                        if self.rho.is_none_or(|r| r <= 0.0) {
                            bail!("algebra rescale needs a positive `rho`");
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

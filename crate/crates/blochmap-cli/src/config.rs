//! Run configuration: defaults, JSON config files, flag overrides, and the
//! effective config echoed into every output header.

use anyhow::{anyhow, bail, Context};
use serde::{Deserialize, Serialize};

/// Everything a run needs, fully resolved. Serialized verbatim into output
/// headers so a run can be reproduced byte-for-byte from any output file.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub version: String,
    pub s: String,
    pub delta: f64,
    pub ensemble: usize,
    pub sampling: String,
    pub axis_theta_m: f64,
    pub axis_phi_m: f64,
    pub n_max: usize,
    pub epsilon: f64,
    pub window: usize,
    pub threshold: f64,
    pub precision: String,
    pub seed: u64,
    pub format: String,
    pub threads: usize,
    pub resolution: usize,
    pub horizon: usize,
    pub half_width: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub perturb: Option<f64>,
    pub theta_max: f64,
    pub d_theta: f64,
    pub d_phi: f64,
    pub digits_min: u32,
    pub digits_max: u32,
    pub samples: usize,
    pub pair_mode: String,
    pub histogram_at: Vec<usize>,
    pub bins: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub theta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<f64>,
    pub points: usize,
}

/// Sparse overlay: a config file or the command line may set any subset.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigOverlay {
    pub s: Option<String>,
    pub delta: Option<f64>,
    pub ensemble: Option<usize>,
    pub sampling: Option<String>,
    pub axis_theta_m: Option<f64>,
    pub axis_phi_m: Option<f64>,
    pub n_max: Option<usize>,
    pub epsilon: Option<f64>,
    pub window: Option<usize>,
    pub threshold: Option<f64>,
    pub precision: Option<String>,
    pub seed: Option<u64>,
    pub format: Option<String>,
    pub threads: Option<usize>,
    pub resolution: Option<usize>,
    pub horizon: Option<usize>,
    pub half_width: Option<f64>,
    pub perturb: Option<f64>,
    pub theta_max: Option<f64>,
    pub d_theta: Option<f64>,
    pub d_phi: Option<f64>,
    pub digits_min: Option<u32>,
    pub digits_max: Option<u32>,
    pub samples: Option<usize>,
    pub pair_mode: Option<String>,
    pub histogram_at: Option<Vec<usize>>,
    pub bins: Option<usize>,
    pub theta: Option<f64>,
    pub phi: Option<f64>,
    pub points: Option<usize>,
}

impl ConfigOverlay {
    pub fn from_json_file(path: &std::path::Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config file {}", path.display()))?;
        serde_json::from_str(&text)
            .with_context(|| format!("parsing config file {}", path.display()))
    }

    /// Later overlays win field by field.
    pub fn merged_over(self, base: ConfigOverlay) -> ConfigOverlay {
        macro_rules! pick {
            ($($f:ident),*) => {
                ConfigOverlay { $( $f: self.$f.or(base.$f) ),* }
            };
        }
        pick!(
            s, delta, ensemble, sampling, axis_theta_m, axis_phi_m, n_max, epsilon, window,
            threshold, precision, seed, format, threads, resolution, horizon, half_width,
            perturb, theta_max, d_theta, d_phi, digits_min, digits_max, samples, pair_mode,
            histogram_at, bins, theta, phi, points
        )
    }
}

impl RunConfig {
    /// Paper-default settings; a few fields depend on the subcommand.
    pub fn resolve(command: &str, overlay: ConfigOverlay) -> anyhow::Result<RunConfig> {
        let threshold_default = match command {
            "heatmap" => 0.05,
            // chordal separation flagging a sensitive pixel
            "julia" | "boxdim" => 0.5,
            _ => 1e-10,
        };
        let precision_default = match command {
            "julia" | "boxdim" => "f64",
            _ => "dd",
        };
        let resolution_default = match command {
            "heatmap" => 64,
            _ => 1024,
        };
        let cfg = RunConfig {
            command: command.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            s: overlay.s.unwrap_or_else(|| "i".to_string()),
            delta: overlay.delta.unwrap_or(1e-1),
            ensemble: overlay.ensemble.unwrap_or(10_000),
            sampling: overlay.sampling.unwrap_or_else(|| "grid".to_string()),
            axis_theta_m: overlay.axis_theta_m.unwrap_or(std::f64::consts::FRAC_PI_2),
            axis_phi_m: overlay.axis_phi_m.unwrap_or(0.0),
            n_max: overlay.n_max.unwrap_or(100),
            epsilon: overlay.epsilon.unwrap_or(0.05),
            window: overlay.window.unwrap_or(10),
            threshold: overlay.threshold.unwrap_or(threshold_default),
            precision: overlay.precision.unwrap_or_else(|| precision_default.to_string()),
            seed: overlay.seed.unwrap_or(42),
            format: overlay.format.unwrap_or_else(|| "csv".to_string()),
            threads: overlay.threads.unwrap_or(0),
            resolution: overlay.resolution.unwrap_or(resolution_default),
            horizon: overlay.horizon.unwrap_or(200),
            half_width: overlay.half_width.unwrap_or(2.0),
            perturb: overlay.perturb,
            theta_max: overlay.theta_max.unwrap_or(std::f64::consts::PI / 10.0),
            d_theta: overlay.d_theta.unwrap_or(0.0),
            d_phi: overlay.d_phi.unwrap_or(1e-8),
            digits_min: overlay.digits_min.unwrap_or(4),
            digits_max: overlay.digits_max.unwrap_or(16),
            samples: overlay.samples.unwrap_or(1000),
            pair_mode: overlay.pair_mode.unwrap_or_else(|| "random".to_string()),
            histogram_at: overlay.histogram_at.unwrap_or_else(|| vec![0, 10, 30, 60]),
            bins: overlay.bins.unwrap_or(10),
            theta: overlay.theta,
            phi: overlay.phi,
            points: overlay.points.unwrap_or(512),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> anyhow::Result<()> {
        parse_s(&self.s)?;
        if !["csv", "json"].contains(&self.format.as_str()) {
            bail!("format must be csv or json, got '{}'", self.format);
        }
        if !["grid", "uniform"].contains(&self.sampling.as_str()) {
            bail!("sampling must be grid or uniform, got '{}'", self.sampling);
        }
        if !["f64", "dd"].contains(&self.precision.as_str()) {
            bail!("precision must be f64 or dd, got '{}'", self.precision);
        }
        if !["random", "delta"].contains(&self.pair_mode.as_str()) {
            bail!("pair-mode must be random or delta, got '{}'", self.pair_mode);
        }
        if self.digits_min < 1 || self.digits_max < self.digits_min {
            bail!("need 1 <= digits-min <= digits-max");
        }
        Ok(())
    }

    pub fn s_value(&self) -> (f64, f64) {
        parse_s(&self.s).expect("validated at resolve time")
    }

    /// One-line JSON of the effective config, embedded in output headers.
    pub fn echo(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn default_output_name(&self) -> String {
        match (self.command.as_str(), self.format.as_str()) {
            ("julia", _) => "julia.pgm".to_string(),
            ("circuit-verify", _) => "circuit-verify.json".to_string(),
            (cmd, fmt) => format!("{cmd}.{fmt}"),
        }
    }
}

/// Complex map parameter from a compact string: "0", "i", "-i", "0.5i",
/// "1e-3i", "0.2", "0.1+0.3i", "0.1-0.3i".
pub fn parse_s(text: &str) -> anyhow::Result<(f64, f64)> {
    let t = text.trim().replace(' ', "");
    if t.is_empty() {
        bail!("empty map parameter");
    }
    if t == "i" || t == "+i" {
        return Ok((0.0, 1.0));
    }
    if t == "-i" {
        return Ok((0.0, -1.0));
    }
    if let Some(im) = t.strip_suffix('i') {
        // purely imaginary, or a+bi with a sign separating the parts
        let bytes = im.as_bytes();
        // find a +/- that is not leading and not part of an exponent
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k] as char;
            if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
                split = Some(k);
                break;
            }
        }
        if let Some(k) = split {
            let re: f64 = im[..k]
                .parse()
                .map_err(|_| anyhow!("bad real part in map parameter '{text}'"))?;
            let imag_text = &im[k..];
            let imag: f64 = if imag_text == "+" {
                1.0
            } else if imag_text == "-" {
                -1.0
            } else {
                imag_text
                    .parse()
                    .map_err(|_| anyhow!("bad imaginary part in map parameter '{text}'"))?
            };
            return Ok((re, imag));
        }
        let imag: f64 = im
            .parse()
            .map_err(|_| anyhow!("bad imaginary part in map parameter '{text}'"))?;
        return Ok((0.0, imag));
    }
    let re: f64 = t
        .parse()
        .map_err(|_| anyhow!("bad map parameter '{text}' (examples: 0, i, 0.5i, 0.1+0.3i)"))?;
    Ok((re, 0.0))
}

use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::channel::{FiberSpec, ObpfSpec, OpticalAmpSpec};
use crate::error::{Error, Result};
use crate::frontend::{AmplifierModel, DacModel, LaserModel, MixerModel, MzmModel, TxFrontend};
use crate::rng::{Generator, Seed};
use crate::rxdsp::{
    BitrateFormula, DigitizerModel, FfeConfig, MetricsOptions, PhotodiodeModel, RateTable,
};
use crate::shaping::{
    maxwell_boltzmann, nu_for_entropy, shaped_frame, uniform_frame, PamAlphabet, SymbolFrame,
};
use crate::sigcore::FilterShape;
use crate::txdsp::{BandPlan, VolterraStructure};

/// Current configuration schema version.
pub const SCHEMA_VERSION: u32 = 1;

/// Names of the built-in presets.
pub const PRESETS: [&str; 2] = ["C-band-216G", "O-band-216G"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Band {
    C,
    O,
}

/// Symbol format.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Modulation {
    /// Probabilistically shaped PAM12 with the given entropy target.
    PsPam12 {
        entropy_bits: f64,
    },
    UniformPam8,
    UniformPam {
        levels: usize,
    },
}

impl Modulation {
    pub fn alphabet(&self) -> Result<PamAlphabet> {
        match *self {
            Modulation::PsPam12 { .. } => Ok(PamAlphabet::pam12()),
            Modulation::UniformPam8 => Ok(PamAlphabet::pam8()),
            Modulation::UniformPam { levels } => PamAlphabet::pam(levels),
        }
    }

    /// Bitrate formula matching the format: shaped formats and uniform
    /// formats with unused labels use `(H − (1 − R)·m)·B`, power-of-two
    /// uniform formats use `m·R·B`.
    pub fn bitrate_formula(&self) -> BitrateFormula {
        match *self {
            Modulation::PsPam12 { .. } => BitrateFormula::Shaped,
            Modulation::UniformPam8 => BitrateFormula::Uniform,
            Modulation::UniformPam { levels } if levels.is_power_of_two() => {
                BitrateFormula::Uniform
            }
            Modulation::UniformPam { .. } => BitrateFormula::Shaped,
        }
    }

    /// Draws a frame of `n` symbols.
    pub fn frame(&self, n: usize, ccdm_block: usize, seed: Seed) -> Result<SymbolFrame> {
        let a = self.alphabet()?;
        match *self {
            Modulation::PsPam12 { entropy_bits } => {
                let nu = nu_for_entropy(entropy_bits, &a)?;
                let target = maxwell_boltzmann(nu, &a)?;
                shaped_frame(&a, &target, n, ccdm_block, seed)
            }
            _ => uniform_frame(&a, n, seed),
        }
    }
}

/// Volterra pre-distortion learned on a separately seeded training frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DpdConfig {
    pub structure: VolterraStructure,
    pub training_symbols: usize,
}

impl Default for DpdConfig {
    fn default() -> Self {
        DpdConfig {
            structure: VolterraStructure::default(),
            training_symbols: 8192,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TxDspConfig {
    pub rrc_rolloff: f64,
    #[serde(default)]
    pub dpd: Option<DpdConfig>,
    /// Cap on the linear pre-emphasis gain; 0 disables pre-emphasis.
    pub preemphasis_max_boost_db: f64,
    /// RMS modulator drive relative to V_π.
    pub drive_rms_vpi: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChannelConfig {
    /// `None` is back-to-back.
    #[serde(default)]
    pub fiber: Option<FiberSpec>,
    /// Additional lumped loss after the fiber (connectors, fan-out).
    #[serde(default)]
    pub extra_loss_db: f64,
    #[serde(default)]
    pub amplifier: Option<OpticalAmpSpec>,
    #[serde(default)]
    pub obpf: Option<ObpfSpec>,
    /// Set the OBPF dispersion trim to the fiber's accumulated dispersion.
    #[serde(default)]
    pub obpf_auto_cd_trim: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RxConfig {
    pub photodiode: PhotodiodeModel,
    pub digitizer: DigitizerModel,
    pub preamble_symbols: usize,
    pub ffe: FfeConfig,
    #[serde(default)]
    pub metrics: MetricsOptions,
}

fn default_schema() -> u32 {
    SCHEMA_VERSION
}

fn default_ccdm_block() -> usize {
    1024
}

/// Complete description of one simulated link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkConfig {
    #[serde(default = "default_schema")]
    pub schema_version: u32,
    pub name: String,
    pub band: Band,
    pub symbol_rate_gbd: f64,
    pub modulation: Modulation,
    /// Requested frame length; rounded up so every sample rate in the chain
    /// divides the record evenly.
    pub sequence_length_symbols: usize,
    #[serde(default = "default_ccdm_block")]
    pub ccdm_block_length: usize,
    pub seed: u64,
    #[serde(default)]
    pub generator: Generator,
    pub band_plan: BandPlan,
    pub frontend: TxFrontend,
    pub channel: ChannelConfig,
    pub tx: TxDspConfig,
    pub rx: RxConfig,
}

impl LinkConfig {
    /// Built-in preset by name.
    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "C-band-216G" => Ok(Self::c_band_216g()),
            "O-band-216G" => Ok(Self::o_band_216g()),
            other => Err(Error::Config(format!(
                "unknown preset {other:?}; available: {}",
                PRESETS.join(", ")
            ))),
        }
    }

    /// 216-GBd PS-PAM12 over 11 km of dispersion-shifted fiber at 1550 nm.
    pub fn c_band_216g() -> Self {
        let plan = BandPlan::c_band();
        let fiber = FiberSpec::dsf_11km();
        LinkConfig {
            schema_version: SCHEMA_VERSION,
            name: "C-band-216G".into(),
            band: Band::C,
            symbol_rate_gbd: 216.0,
            modulation: Modulation::PsPam12 { entropy_bits: 3.5 },
            sequence_length_symbols: 1 << 16,
            ccdm_block_length: default_ccdm_block(),
            seed: 1,
            generator: Generator::default(),
            band_plan: plan,
            frontend: TxFrontend {
                analog_rate_hz: 512e9,
                dac: DacModel {
                    resolution_bits: Some(8),
                    ..DacModel::default()
                },
                mixer: MixerModel::new(plan.lo_frequency_hz),
                image_hpf_cutoff_hz: plan.analog_hpf_cutoff_hz,
                image_hpf_shape: FilterShape::Ideal,
                upper_amplifier: None,
                combiner_gain_imbalance_db: 0.0,
                combiner_skew_s: 0.0,
                amplifiers: vec![
                    AmplifierModel::new(7.0, 130e9),
                    AmplifierModel::new(16.0, 100e9),
                ],
                mzm: MzmModel::new(2.8),
                laser: LaserModel::new(1550.0, 20.0),
            },
            channel: ChannelConfig {
                fiber: Some(fiber),
                extra_loss_db: 0.0,
                amplifier: Some(OpticalAmpSpec {
                    label: "PM-EDFA".into(),
                    gain_db: 10.0,
                    noise_density_w_hz: 2e-17,
                }),
                obpf: Some(ObpfSpec {
                    pd_inverse_bandwidth_hz: Some(100e9),
                    max_boost_db: 6.0,
                    ..ObpfSpec::passband(300e9)
                }),
                obpf_auto_cd_trim: true,
            },
            tx: TxDspConfig {
                rrc_rolloff: 0.01,
                dpd: Some(DpdConfig::default()),
                preemphasis_max_boost_db: 12.0,
                drive_rms_vpi: 0.15,
            },
            rx: RxConfig {
                photodiode: PhotodiodeModel {
                    thermal_noise_a2_hz: 1e-22,
                    ..PhotodiodeModel::default()
                },
                digitizer: DigitizerModel {
                    resolution_bits: Some(8),
                    relative_noise_rms: 0.14,
                    ..DigitizerModel::default()
                },
                preamble_symbols: 512,
                ffe: FfeConfig::default(),
                metrics: MetricsOptions::default(),
            },
        }
    }

    /// 216-GBd uniform PAM8 over one 2-km core of a four-core fiber at
    /// 1310 nm.
    pub fn o_band_216g() -> Self {
        let c = Self::c_band_216g();
        let plan = BandPlan::o_band();
        LinkConfig {
            name: "O-band-216G".into(),
            band: Band::O,
            modulation: Modulation::UniformPam8,
            band_plan: plan,
            frontend: TxFrontend {
                mixer: MixerModel::new(plan.lo_frequency_hz),
                image_hpf_cutoff_hz: plan.analog_hpf_cutoff_hz,
                upper_amplifier: Some(AmplifierModel::new(0.0, 130e9)),
                mzm: MzmModel::new(2.5),
                laser: LaserModel::new(1310.0, 20.0),
                ..c.frontend
            },
            channel: ChannelConfig {
                fiber: Some(FiberSpec::four_core(0)),
                amplifier: Some(OpticalAmpSpec {
                    label: "PDFA".into(),
                    ..c.channel
                        .amplifier
                        .clone()
                        .expect("preset has an amplifier")
                }),
                ..c.channel
            },
            ..c
        }
    }

    /// Transparent link: no bandwidth limits, noise, quantization, fiber or
    /// pre-distortion, and a rate table reaching rate 1.
    pub fn ideal(band: Band) -> Self {
        let base = match band {
            Band::C => Self::c_band_216g(),
            Band::O => Self::o_band_216g(),
        };
        let plan = base.band_plan;
        let mut rates = RateTable::default();
        rates.rows.push((1.0, 1.0));
        LinkConfig {
            name: format!("{}-ideal", base.name),
            sequence_length_symbols: 1 << 13,
            frontend: TxFrontend::ideal(
                &plan,
                base.frontend.laser.clone(),
                base.frontend.mzm.v_pi_volts,
            ),
            channel: ChannelConfig {
                fiber: None,
                extra_loss_db: 0.0,
                amplifier: None,
                obpf: None,
                obpf_auto_cd_trim: false,
            },
            tx: TxDspConfig {
                dpd: None,
                preemphasis_max_boost_db: 0.0,
                drive_rms_vpi: 0.05,
                ..base.tx
            },
            rx: RxConfig {
                photodiode: PhotodiodeModel {
                    bandwidth_hz: None,
                    ..PhotodiodeModel::default()
                },
                digitizer: DigitizerModel {
                    bandwidth_hz: None,
                    ..DigitizerModel::default()
                },
                metrics: MetricsOptions {
                    rate_table: rates,
                    outer_fec_deduction: false,
                },
                ..base.rx
            },
            ..base
        }
    }

    pub fn seed(&self) -> Seed {
        Seed::new(self.seed, self.generator)
    }

    pub fn symbol_rate_hz(&self) -> f64 {
        self.symbol_rate_gbd * 1e9
    }

    /// Reads a configuration document. A top-level `"preset"` key names the
    /// starting point; the remaining keys override it field by field.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: Value = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed JSON: {e}")))?;
        let Value::Object(mut map) = doc else {
            return Err(Error::Config("configuration must be a JSON object".into()));
        };
        let merged = match map.remove("preset") {
            Some(Value::String(name)) => {
                let mut base =
                    serde_json::to_value(Self::preset(&name)?).expect("presets serialize");
                merge(&mut base, Value::Object(map));
                base
            }
            Some(other) => {
                return Err(Error::Config(format!(
                    "preset must be a string, got {other}"
                )))
            }
            None => Value::Object(map),
        };
        let cfg: LinkConfig =
            serde_json::from_value(merged).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let cfg_err = |m: String| Err(Error::Config(m));
        if self.schema_version != SCHEMA_VERSION {
            return cfg_err(format!(
                "schema version {} is not supported (expected {SCHEMA_VERSION})",
                self.schema_version
            ));
        }
        if !(self.symbol_rate_gbd > 0.0 && self.symbol_rate_gbd.is_finite()) {
            return cfg_err(format!(
                "symbol rate {} GBd must be positive",
                self.symbol_rate_gbd
            ));
        }
        if self.sequence_length_symbols < 1024 {
            return cfg_err("sequence length must be at least 1024 symbols".into());
        }
        if self.ccdm_block_length == 0 {
            return cfg_err("CCDM block length must be positive".into());
        }
        self.band_plan.validate()?;
        self.frontend.laser.validate()?;
        let lambda = self.frontend.laser.wavelength_nm;
        let in_band = match self.band {
            Band::C => lambda >= 1500.0,
            Band::O => lambda <= 1360.0,
        };
        if !in_band {
            return cfg_err(format!(
                "laser at {lambda} nm does not match band {:?}",
                self.band
            ));
        }
        if let Modulation::PsPam12 { entropy_bits } = self.modulation {
            nu_for_entropy(entropy_bits, &PamAlphabet::pam12())?;
        }
        self.modulation.alphabet()?;
        if !(0.0..=1.0).contains(&self.tx.rrc_rolloff) {
            return cfg_err(format!("roll-off {} outside [0, 1]", self.tx.rrc_rolloff));
        }
        if !(self.tx.drive_rms_vpi > 0.0) {
            return cfg_err("drive level must be positive".into());
        }
        if !(self.rx.ffe.train_fraction > 0.0 && self.rx.ffe.train_fraction < 0.9) {
            return cfg_err("FFE training fraction must lie in (0, 0.9)".into());
        }
        if self.rx.preamble_symbols == 0
            || self.rx.preamble_symbols * 4 > self.sequence_length_symbols
        {
            return cfg_err("preamble must be non-empty and at most a quarter of the frame".into());
        }
        self.rx.metrics.rate_table.validate()?;
        if let Some(f) = &self.channel.fiber {
            f.validate()?;
        }
        if !(self.channel.extra_loss_db >= 0.0) {
            return cfg_err("extra loss must be >= 0 dB".into());
        }
        // The occupied band must be reconstructible by both branches and fit
        // every sampling stage.
        let edge = (1.0 + self.tx.rrc_rolloff) * self.symbol_rate_hz() / 2.0;
        let plan = &self.band_plan;
        let reach = plan.lo_frequency_hz + plan.awg_bandwidth_hz;
        if edge > reach {
            return cfg_err(format!(
                "signal band edge {:.1} GHz exceeds the reconstructible band {:.1} GHz",
                edge / 1e9,
                reach / 1e9
            ));
        }
        for (name, fs) in [
            ("analog", self.frontend.analog_rate_hz),
            ("digitizer", self.rx.digitizer.sample_rate_hz),
        ] {
            if edge >= fs / 2.0 {
                return cfg_err(format!(
                    "signal band edge {:.1} GHz is not below the {name} Nyquist frequency {:.1} GHz",
                    edge / 1e9,
                    fs / 2e9
                ));
            }
        }
        super::link::frame_length(self)?;
        Ok(())
    }
}

fn merge(base: &mut Value, patch: Value) {
    match (base, patch) {
        (Value::Object(b), Value::Object(p)) => {
            for (k, v) in p {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, p) => *b = p,
    }
}

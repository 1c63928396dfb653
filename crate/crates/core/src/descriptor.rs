//! Plain-text system descriptor: everything needed to rebuild a system
//! bit-identically.
//!
//! ```text
//! shearlet-system 1
//! dims 512 512
//! j0 0
//! shear_levels 1 1 2 2
//! full_system false
//! wedge finest
//! qmf_center 4
//! qmf_taps 0.0104933... ...
//! fan_sha256 b3b4f8...
//! ```

use crate::error::{Error, Result};
use crate::filters::{default_fan_filter, FanFilter, QmfPair, ScaleProfile, Taps};
use crate::system::{ShearletSystem, SystemConfig, WedgeScaling};
use crate::{build_system_2d, build_system_3d};

const HEADER: &str = "shearlet-system 1";

#[derive(Clone, Debug, PartialEq)]
pub struct SystemDescriptor {
    pub dims: Vec<usize>,
    pub j0: u32,
    pub shear_levels: Vec<u32>,
    pub full_system: bool,
    pub wedge: WedgeScaling,
    pub qmf: Taps,
    pub fan_sha256: String,
}

impl SystemDescriptor {
    pub fn new(dims: &[usize], config: &SystemConfig) -> Self {
        SystemDescriptor {
            dims: dims.to_vec(),
            j0: config.profile.j0,
            shear_levels: config.profile.shear_levels.clone(),
            full_system: config.full_system,
            wedge: config.wedge,
            qmf: config.qmf.lowpass.clone(),
            fan_sha256: config.fan.checksum.clone(),
        }
    }

    pub fn of(system: &ShearletSystem) -> Result<Self> {
        let cfg = system
            .config()
            .ok_or_else(|| Error::Config("system was built from raw filters".into()))?;
        Ok(Self::new(system.shape(), cfg))
    }

    pub fn to_text(&self) -> String {
        let join = |v: Vec<String>| v.join(" ");
        let mut s = String::new();
        s.push_str(HEADER);
        s.push('\n');
        s.push_str(&format!(
            "dims {}\n",
            join(self.dims.iter().map(|d| d.to_string()).collect())
        ));
        s.push_str(&format!("j0 {}\n", self.j0));
        s.push_str(&format!(
            "shear_levels {}\n",
            join(self.shear_levels.iter().map(|d| d.to_string()).collect())
        ));
        s.push_str(&format!("full_system {}\n", self.full_system));
        s.push_str(&format!("wedge {}\n", self.wedge.name()));
        s.push_str(&format!("qmf_center {}\n", self.qmf.center()));
        s.push_str(&format!(
            "qmf_taps {}\n",
            join(
                self.qmf
                    .as_slice()
                    .iter()
                    .map(|v| format!("{v:?}"))
                    .collect()
            )
        ));
        s.push_str(&format!("fan_sha256 {}\n", self.fan_sha256));
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let bad = |m: String| Error::Config(m);
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        if lines.next() != Some(HEADER) {
            return Err(bad(format!("descriptor must start with '{HEADER}'")));
        }
        let (mut dims, mut j0, mut levels, mut full, mut wedge, mut center, mut taps, mut sha) =
            (None, None, None, None, None, None, None, None);
        for line in lines {
            let (key, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            let nums = |r: &str| -> Result<Vec<u64>> {
                r.split_whitespace()
                    .map(|t| t.parse::<u64>().map_err(|e| bad(format!("{key}: {e}"))))
                    .collect()
            };
            match key {
                "dims" => {
                    dims = Some(
                        nums(rest)?
                            .into_iter()
                            .map(|v| v as usize)
                            .collect::<Vec<_>>(),
                    )
                }
                "j0" => j0 = Some(rest.parse::<u32>().map_err(|e| bad(format!("j0: {e}")))?),
                "shear_levels" => {
                    levels = Some(
                        nums(rest)?
                            .into_iter()
                            .map(|v| v as u32)
                            .collect::<Vec<_>>(),
                    )
                }
                "full_system" => {
                    full = Some(
                        rest.parse::<bool>()
                            .map_err(|e| bad(format!("full_system: {e}")))?,
                    )
                }
                "wedge" => wedge = Some(WedgeScaling::parse(rest)?),
                "qmf_center" => {
                    center = Some(
                        rest.parse::<usize>()
                            .map_err(|e| bad(format!("qmf_center: {e}")))?,
                    )
                }
                "qmf_taps" => {
                    taps = Some(
                        rest.split_whitespace()
                            .map(|t| t.parse::<f64>().map_err(|e| bad(format!("qmf_taps: {e}"))))
                            .collect::<Result<Vec<_>>>()?,
                    )
                }
                "fan_sha256" => sha = Some(rest.to_string()),
                _ => return Err(bad(format!("unknown descriptor key '{key}'"))),
            }
        }
        let need = |what: &str| bad(format!("descriptor is missing '{what}'"));
        let dims: Vec<usize> = dims.ok_or_else(|| need("dims"))?;
        if !(2..=3).contains(&dims.len()) {
            return Err(bad(format!(
                "dims must have 2 or 3 entries, got {}",
                dims.len()
            )));
        }
        let qmf = Taps::new(
            taps.ok_or_else(|| need("qmf_taps"))?,
            center.ok_or_else(|| need("qmf_center"))?,
        )?;
        Ok(SystemDescriptor {
            dims,
            j0: j0.ok_or_else(|| need("j0"))?,
            shear_levels: levels.ok_or_else(|| need("shear_levels"))?,
            full_system: full.ok_or_else(|| need("full_system"))?,
            wedge: wedge.ok_or_else(|| need("wedge"))?,
            qmf,
            fan_sha256: sha.ok_or_else(|| need("fan_sha256"))?,
        })
    }

    /// Resolves the fan by checksum: the shipped default, the impulse, or
    /// a caller-supplied filter whose checksum must match.
    pub fn config(&self, custom_fan: Option<&FanFilter>) -> Result<SystemConfig> {
        let default = default_fan_filter()?;
        let impulse = FanFilter::impulse();
        let fan = if self.fan_sha256 == default.checksum {
            default
        } else if self.fan_sha256 == impulse.checksum {
            impulse
        } else {
            match custom_fan {
                Some(f) if f.checksum == self.fan_sha256 => f.clone(),
                Some(f) => {
                    return Err(Error::Config(format!(
                        "fan checksum {} does not match the descriptor's {}",
                        f.checksum, self.fan_sha256
                    )))
                }
                None => {
                    return Err(Error::Config(format!(
                        "descriptor needs the fan filter with checksum {}",
                        self.fan_sha256
                    )))
                }
            }
        };
        Ok(SystemConfig {
            profile: ScaleProfile::new(self.shear_levels.clone(), self.j0),
            full_system: self.full_system,
            wedge: self.wedge,
            qmf: QmfPair::from_lowpass(self.qmf.clone()),
            fan,
        })
    }

    pub fn build(&self, custom_fan: Option<&FanFilter>) -> Result<ShearletSystem> {
        let cfg = self.config(custom_fan)?;
        match self.dims[..] {
            [a, b] => build_system_2d([a, b], &cfg),
            [a, b, c] => build_system_3d([a, b, c], &cfg),
            _ => unreachable!("validated at parse"),
        }
    }
}

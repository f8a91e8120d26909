use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::WindowConfig;
use crate::Error;

/// Attention kernels compared by the benchmarks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AttentionKind {
    Pam,
    Pga,
    Halo,
    Global,
}

impl AttentionKind {
    pub const ALL: [AttentionKind; 4] = [Self::Pam, Self::Pga, Self::Halo, Self::Global];

    pub fn name(self) -> &'static str {
        match self {
            Self::Pam => "pam",
            Self::Pga => "pga",
            Self::Halo => "halo",
            Self::Global => "global",
        }
    }
}

impl fmt::Display for AttentionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(self.name())
    }
}

impl FromStr for AttentionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown kernel '{s}' (expected pam, pga, halo or global)")))
    }
}

/// Tile side used by the blocked baseline.
pub const HALO_BLOCK: usize = 8;

/// Tile side and halo width the benchmarks use for blocked attention: fixed
/// 8×8 tiles with a halo of the window padding, so each query sees at least
/// its `k×k` neighborhood.
pub fn halo_geometry(cfg: WindowConfig) -> (usize, usize) {
    (HALO_BLOCK, cfg.padding())
}

/// Dominant multiply-accumulate count (query·key plus attention·value).
///
/// - pam: `2·n·k²·c`
/// - pga, global: `2·n²·c` (pga scores the full dense matrix)
/// - halo: `2·n·(block + 2·halo)²·c`
pub fn flops_estimate(kind: AttentionKind, b: usize, c: usize, h: usize, w: usize, cfg: WindowConfig) -> u64 {
    let (b, c, n) = (b as u64, c as u64, (h * w) as u64);
    match kind {
        AttentionKind::Pam => 2 * b * n * cfg.area() as u64 * c,
        AttentionKind::Pga | AttentionKind::Global => 2 * b * n * n * c,
        AttentionKind::Halo => {
            let (block, halo) = halo_geometry(cfg);
            let side = (block + 2 * halo) as u64;
            2 * b * n * side * side * c
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formula_instances() {
        let cfg = WindowConfig::new(3).unwrap();
        assert_eq!(flops_estimate(AttentionKind::Pam, 1, 4, 4, 4, cfg), 1152);
        assert_eq!(flops_estimate(AttentionKind::Global, 1, 4, 4, 4, cfg), 2048);
        assert_eq!(flops_estimate(AttentionKind::Pga, 1, 4, 4, 4, cfg), 2048);
        // 16×16 → block 8, halo 1, side 10
        assert_eq!(flops_estimate(AttentionKind::Halo, 1, 4, 16, 16, cfg), 2 * 256 * 100 * 4);
    }

    #[test]
    fn global_over_pam_is_n_over_k_squared() {
        for (h, k) in [(6, 3), (10, 5), (9, 1)] {
            let cfg = WindowConfig::new(k).unwrap();
            let g = flops_estimate(AttentionKind::Global, 2, 8, h, h, cfg);
            let p = flops_estimate(AttentionKind::Pam, 2, 8, h, h, cfg);
            assert_eq!(g * (k * k) as u64, p * (h * h) as u64);
        }
    }

    #[test]
    fn names_round_trip() {
        for k in AttentionKind::ALL {
            assert_eq!(k.name().parse::<AttentionKind>().unwrap(), k);
        }
        assert!("sasa".parse::<AttentionKind>().is_err());
    }
}

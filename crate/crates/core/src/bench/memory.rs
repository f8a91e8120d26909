//! Analytic live-set accounting of materialised intermediates.
//!
//! Each kernel declares the tensors it holds at every phase; the tracker
//! reports the largest phase total. Per-tile scratch of the blocked kernel is
//! counted once since tiles are processed one per worker. Element size follows the precision mode;
//! the boolean adjacency mask is one byte per entry and neighbor indices are
//! four-byte integers.

use crate::attention::{halo_geometry, AttentionKind, WindowConfig};

/// One declared tensor: name, element count and bytes per element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tensor {
    pub name: &'static str,
    pub elements: u64,
    pub elem_bytes: u64,
}

impl Tensor {
    fn bytes(&self) -> u64 {
        self.elements * self.elem_bytes
    }
}

/// Tensors live at the same time.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Phase {
    pub name: &'static str,
    pub tensors: Vec<Tensor>,
}

impl Phase {
    pub fn bytes(&self) -> u64 {
        self.tensors.iter().map(Tensor::bytes).sum()
    }
}

/// Declared phases of one kernel run on `[b, c, h, w]` input.
pub fn live_phases(kind: AttentionKind, b: usize, c: usize, h: usize, w: usize, cfg: WindowConfig, elem_bytes: usize) -> Vec<Phase> {
    let (b, c, n, kk) = (b as u64, c as u64, (h * w) as u64, cfg.area() as u64);
    let eb = elem_bytes as u64;
    let t = |name, elements| Tensor { name, elements, elem_bytes: eb };
    let map = b * c * n;
    let io = || vec![t("input", map), t("output", map)];
    let with_io = |name, extra: Vec<Tensor>| Phase {
        name,
        tensors: io().into_iter().chain(extra).collect(),
    };
    if map == 0 {
        return vec![with_io("io", vec![])];
    }
    match kind {
        AttentionKind::Pam => vec![
            with_io("transform", vec![t("q", map), t("k", map), t("v", map)]),
            with_io("unfold", vec![t("q", map), t("k_unfolded", map * kk), t("v", map), t("v_unfolded", map * kk)]),
            with_io(
                "attend",
                vec![t("q", map), t("k_unfolded", map * kk), t("v_unfolded", map * kk), t("attention", b * n * kk)],
            ),
        ],
        AttentionKind::Global => vec![
            with_io("transform", vec![t("q", map), t("k", map), t("v", map)]),
            with_io("attend", vec![t("q", map), t("k", map), t("v", map), t("scores", n * n), t("rows", c * n)]),
        ],
        AttentionKind::Pga => {
            let graph = vec![
                Tensor { name: "neighbors", elements: n * kk, elem_bytes: 4 },
                Tensor { name: "adjacency", elements: n * n, elem_bytes: 1 },
            ];
            vec![
                with_io("graph", graph.clone()),
                with_io(
                    "attend",
                    graph
                        .into_iter()
                        .chain([t("q", map), t("k", map), t("v", map), t("scores", n * n), t("attention", n * n)])
                        .collect(),
                ),
            ]
        }
        AttentionKind::Halo => {
            let (block, halo) = halo_geometry(cfg);
            let side = (block + 2 * halo) as u64;
            let tiles = (h.div_ceil(block) * w.div_ceil(block)) as u64;
            let block = block as u64;
            vec![
                with_io("transform", vec![t("q", map), t("k", map), t("v", map)]),
                with_io(
                    "attend",
                    vec![
                        t("q", map),
                        t("k", map),
                        t("v", map),
                        t("tile_keys", side * side * c),
                        t("tile_values", side * side * c),
                        t("tile_scores", block * block * side * side),
                        t("tile_outputs", tiles * block * block * c),
                    ],
                ),
            ]
        }
    }
}

/// Peak bytes over the declared phases.
pub fn track_bytes(kind: AttentionKind, b: usize, c: usize, h: usize, w: usize, cfg: WindowConfig, elem_bytes: usize) -> u64 {
    live_phases(kind, b, c, h, w, cfg, elem_bytes)
        .iter()
        .map(Phase::bytes)
        .max()
        .unwrap_or(0)
}

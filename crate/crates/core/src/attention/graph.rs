use super::WindowConfig;
use crate::{Error, Result};

/// Neighbor slot that falls outside the image.
pub const PAD: u32 = u32::MAX;

/// Pixel graph in the adjacency-matrix style: node `i` is pixel `(i / w, i % w)`.
///
/// Holds both the per-node `k²` neighbor slots (row-major over the window,
/// [`PAD`] outside the image) and the dense `n×n` boolean adjacency.
#[derive(Clone, Debug)]
pub struct PgaGraph {
    pub h: usize,
    pub w: usize,
    pub window: WindowConfig,
    neighbors: Vec<u32>,
    dense_mask: Vec<bool>,
}

impl PgaGraph {
    pub fn nodes(&self) -> usize {
        self.h * self.w
    }

    pub fn slots(&self) -> usize {
        self.window.area()
    }

    pub fn neighbors(&self, node: usize) -> &[u32] {
        let kk = self.slots();
        &self.neighbors[node * kk..(node + 1) * kk]
    }

    pub fn pad_count(&self, node: usize) -> usize {
        self.neighbors(node).iter().filter(|&&j| j == PAD).count()
    }

    pub fn mask_row(&self, node: usize) -> &[bool] {
        let n = self.nodes();
        &self.dense_mask[node * n..(node + 1) * n]
    }

    #[inline]
    pub fn is_edge(&self, from: usize, to: usize) -> bool {
        self.dense_mask[from * self.nodes() + to]
    }
}

pub fn build_pixel_graph(h: usize, w: usize, cfg: WindowConfig) -> Result<PgaGraph> {
    if h == 0 || w == 0 {
        return Err(Error::shape("pixel graph needs h, w >= 1"));
    }
    cfg.check_fits(h, w)?;
    let n = h * w;
    let k = cfg.k();
    let p = cfg.padding() as isize;
    let mut neighbors = Vec::with_capacity(n * k * k);
    let mut dense_mask = vec![false; n * n];
    for y in 0..h as isize {
        for x in 0..w as isize {
            let node = (y * w as isize + x) as usize;
            for dy in -p..=p {
                for dx in -p..=p {
                    let (ny, nx) = (y + dy, x + dx);
                    if ny < 0 || nx < 0 || ny >= h as isize || nx >= w as isize {
                        neighbors.push(PAD);
                    } else {
                        let j = (ny * w as isize + nx) as usize;
                        neighbors.push(j as u32);
                        dense_mask[node * n + j] = true;
                    }
                }
            }
        }
    }
    Ok(PgaGraph {
        h,
        w,
        window: cfg,
        neighbors,
        dense_mask,
    })
}

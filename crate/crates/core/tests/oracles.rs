//! Library results against deliberately naive reimplementations.
//!
//! Oracles index raw row-major buffers and share no code with the crate.

use pixgraph::attention::{
    flops_estimate, global_attention, halo_attention, pam_forward, AttentionKind, PamWeights,
};
use pixgraph::bench::track_bytes;
use pixgraph::contour::{hog, pix_loss, HogParams, PixReduction};
use pixgraph::msrb::{axial_fc, blstm_forward, madm, mlp_ffn, msrb_forward, patm_fuse, Axis, ClueMap, MsrbShape, MsrbWeights};
use pixgraph::tensor::{pointwise_linear, softmax_in_place, softmax_lastdim, unfold};
use pixgraph::{FeatureMap, LinearWeights, SeededRng, WindowConfig};

const TOL: f64 = 1e-12;

type Grid = Vec<Vec<Vec<Vec<f64>>>>;

fn grid(f: &FeatureMap) -> Grid {
    let [b, c, h, w] = f.dims();
    let d = f.data();
    (0..b)
        .map(|bi| {
            (0..c)
                .map(|ci| (0..h).map(|y| (0..w).map(|x| d[((bi * c + ci) * h + y) * w + x]).collect()).collect())
                .collect()
        })
        .collect()
}

fn flat(g: &Grid) -> Vec<f64> {
    g.iter().flatten().flatten().flatten().copied().collect()
}

fn assert_close(a: &[f64], b: &[f64], tol: f64, what: &str) {
    assert_eq!(a.len(), b.len(), "{what}: length");
    let worst = a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
    assert!(worst <= tol, "{what}: max diff {worst:e} > {tol:e}");
}

fn matvec(w: &LinearWeights, v: &[f64]) -> Vec<f64> {
    (0..w.c_out())
        .map(|o| {
            let mut s = 0.0;
            for (i, x) in v.iter().enumerate() {
                s += w.w[o * w.c_in() + i] * x;
            }
            s + w.bias[o]
        })
        .collect()
}

fn pointwise(g: &Grid, w: &LinearWeights) -> Grid {
    g.iter()
        .map(|img| {
            let (h, wd) = (img[0].len(), img[0][0].len());
            let mut out = vec![vec![vec![0.0; wd]; h]; w.c_out()];
            for y in 0..h {
                for x in 0..wd {
                    let px: Vec<f64> = img.iter().map(|ch| ch[y][x]).collect();
                    for (o, v) in matvec(w, &px).into_iter().enumerate() {
                        out[o][y][x] = v;
                    }
                }
            }
            out
        })
        .collect()
}

fn naive_softmax(s: &[f64]) -> Vec<f64> {
    let e: Vec<f64> = s.iter().map(|v| v.exp()).collect();
    let z: f64 = e.iter().sum();
    e.iter().map(|v| v / z).collect()
}

/// Attention of one query over explicit key/value lists.
fn attend(q: &[f64], keys: &[Vec<f64>], vals: &[Vec<f64>]) -> Vec<f64> {
    let c = q.len();
    let scores: Vec<f64> = keys
        .iter()
        .map(|k| q.iter().zip(k).map(|(a, b)| a * b).sum::<f64>() / (c as f64).sqrt())
        .collect();
    let a = naive_softmax(&scores);
    let mut out = vec![0.0; c];
    for (wgt, v) in a.iter().zip(vals) {
        for ch in 0..c {
            out[ch] += wgt * v[ch];
        }
    }
    out
}

fn pixel(g: &Grid, b: usize, y: isize, x: isize) -> Vec<f64> {
    let (h, w) = (g[b][0].len() as isize, g[b][0][0].len() as isize);
    if y < 0 || x < 0 || y >= h || x >= w {
        vec![0.0; g[b].len()]
    } else {
        g[b].iter().map(|ch| ch[y as usize][x as usize]).collect()
    }
}

/// Window attention with out-of-image slots as zero key and value.
fn window_oracle(f: &FeatureMap, wts: &PamWeights, k: usize) -> Vec<f64> {
    let g = grid(f);
    let (q, kk, v) = (pointwise(&g, &wts.theta), pointwise(&g, &wts.phi), pointwise(&g, &wts.omega));
    let [b, c, h, w] = f.dims();
    let p = (k / 2) as isize;
    let mut out = vec![vec![vec![vec![0.0; w]; h]; c]; b];
    for bi in 0..b {
        for y in 0..h as isize {
            for x in 0..w as isize {
                let mut keys = Vec::new();
                let mut vals = Vec::new();
                for dy in -p..=p {
                    for dx in -p..=p {
                        keys.push(pixel(&kk, bi, y + dy, x + dx));
                        vals.push(pixel(&v, bi, y + dy, x + dx));
                    }
                }
                let o = attend(&pixel(&q, bi, y, x), &keys, &vals);
                for ch in 0..c {
                    out[bi][ch][y as usize][x as usize] = o[ch];
                }
            }
        }
    }
    flat(&out)
}

#[test]
fn unfold_matches_nested_gather() {
    let mut rng = SeededRng::new(3);
    for _ in 0..10 {
        let dims = [rng.next_range(1, 2), rng.next_range(1, 3), rng.next_range(1, 7), rng.next_range(1, 7)];
        let k = [1, 3, 5][rng.next_range(0, 2)];
        let cfg = WindowConfig::new(k).unwrap();
        if cfg.check_fits(dims[2], dims[3]).is_err() {
            continue;
        }
        let f = FeatureMap::<f64>::random(dims, rng.next_u64()).unwrap();
        let u = unfold(&f, cfg).unwrap();
        let g = grid(&f);
        let p = (k / 2) as isize;
        for bi in 0..dims[0] {
            for ci in 0..dims[1] {
                for dy in 0..k {
                    for dx in 0..k {
                        for y in 0..dims[2] {
                            for x in 0..dims[3] {
                                let row = (ci * k + dy) * k + dx;
                                let px = pixel(&g, bi, y as isize + dy as isize - p, x as isize + dx as isize - p);
                                assert_eq!(u.at(bi, row, y * dims[3] + x), px[ci]);
                            }
                        }
                    }
                }
            }
        }
    }
}

#[test]
fn pointwise_linear_matches_matvec() {
    let mut rng = SeededRng::new(4);
    let f = FeatureMap::<f64>::random([2, 5, 3, 4], 5).unwrap();
    let w = LinearWeights::random(3, 5, &mut rng, true);
    let out = pointwise_linear(&f, &w).unwrap();
    assert_close(out.data(), &flat(&pointwise(&grid(&f), &w)), TOL, "pointwise");
}

#[test]
fn softmax_matches_naive_formula() {
    let mut rng = SeededRng::new(6);
    for len in [1, 2, 9, 25] {
        let row: Vec<f64> = rng.vec_uniform(len, 3.0);
        let mut lib = row.clone();
        softmax_in_place(&mut lib);
        assert_close(&lib, &naive_softmax(&row), 1e-15, "softmax");
    }
    let t = FeatureMap::<f64>::random([1, 2, 3, 5], 7).unwrap();
    let lib = softmax_lastdim(&t);
    let expected: Vec<f64> = t.data().chunks(5).flat_map(naive_softmax).collect();
    assert_close(lib.data(), &expected, 1e-15, "softmax_lastdim");
}

#[test]
fn pam_matches_window_oracle() {
    for (i, (dims, k)) in [([1, 4, 6, 7], 3), ([2, 3, 5, 5], 5), ([1, 8, 4, 9], 1), ([1, 2, 3, 3], 7)]
        .into_iter()
        .enumerate()
    {
        let f = FeatureMap::<f64>::random(dims, 10 + i as u64).unwrap();
        let wts = PamWeights::<f64>::random(dims[1], 20 + i as u64, true);
        let (out, _) = pam_forward(&f, &wts, WindowConfig::new(k).unwrap()).unwrap();
        assert_close(out.data(), &window_oracle(&f, &wts, k), 1e-12, "pam");
    }
}

#[test]
fn halo_matches_tile_oracle() {
    for (i, (h, w, block, halo)) in [(8usize, 8usize, 4usize, 1usize), (7, 6, 4, 1), (5, 9, 8, 2)].into_iter().enumerate() {
        let f = FeatureMap::<f64>::random([1, 3, h, w], 30 + i as u64).unwrap();
        let wts = PamWeights::<f64>::random(3, 31, false);
        let g = grid(&f);
        let (q, k, v) = (pointwise(&g, &wts.theta), pointwise(&g, &wts.phi), pointwise(&g, &wts.omega));
        let mut expected = vec![vec![vec![vec![0.0; w]; h]; 3]; 1];
        for y in 0..h as isize {
            for x in 0..w as isize {
                let (ty, tx) = ((y as usize / block * block) as isize, (x as usize / block * block) as isize);
                let mut keys = Vec::new();
                let mut vals = Vec::new();
                for sy in ty - halo as isize..ty + (block + halo) as isize {
                    for sx in tx - halo as isize..tx + (block + halo) as isize {
                        keys.push(pixel(&k, 0, sy, sx));
                        vals.push(pixel(&v, 0, sy, sx));
                    }
                }
                let o = attend(&pixel(&q, 0, y, x), &keys, &vals);
                for ch in 0..3 {
                    expected[0][ch][y as usize][x as usize] = o[ch];
                }
            }
        }
        let out = halo_attention(&f, &wts, block, halo).unwrap();
        assert_close(out.data(), &flat(&expected), 1e-12, "halo");
    }
}

#[test]
fn global_matches_triple_loop() {
    let f = FeatureMap::<f64>::random([2, 4, 5, 6], 40).unwrap();
    let wts = PamWeights::<f64>::random(4, 41, true);
    let g = grid(&f);
    let (q, k, v) = (pointwise(&g, &wts.theta), pointwise(&g, &wts.phi), pointwise(&g, &wts.omega));
    let mut expected = vec![vec![vec![vec![0.0; 6]; 5]; 4]; 2];
    for bi in 0..2 {
        let keys: Vec<Vec<f64>> = (0..30).map(|p| pixel(&k, bi, p / 6, p % 6)).collect();
        let vals: Vec<Vec<f64>> = (0..30).map(|p| pixel(&v, bi, p / 6, p % 6)).collect();
        for p in 0..30isize {
            let o = attend(&pixel(&q, bi, p / 6, p % 6), &keys, &vals);
            for ch in 0..4 {
                expected[bi][ch][(p / 6) as usize][(p % 6) as usize] = o[ch];
            }
        }
    }
    assert_close(global_attention(&f, &wts).unwrap().data(), &flat(&expected), 1e-12, "global");
}

#[test]
fn axial_fc_matches_per_fiber_matvec() {
    let mut rng = SeededRng::new(50);
    let f = FeatureMap::<f64>::random([2, 3, 4, 5], 51).unwrap();
    let g = grid(&f);
    let wh = LinearWeights::random(4, 4, &mut rng, true);
    let ww = LinearWeights::random(5, 5, &mut rng, true);
    let mut eh = g.clone();
    let mut ew = g.clone();
    for b in 0..2 {
        for c in 0..3 {
            for x in 0..5 {
                let col: Vec<f64> = (0..4).map(|y| g[b][c][y][x]).collect();
                for (y, v) in matvec(&wh, &col).into_iter().enumerate() {
                    eh[b][c][y][x] = v;
                }
            }
            for y in 0..4 {
                ew[b][c][y] = matvec(&ww, &g[b][c][y]);
            }
        }
    }
    assert_close(axial_fc(&f, Axis::Height, &wh).unwrap().data(), &flat(&eh), TOL, "height");
    assert_close(axial_fc(&f, Axis::Width, &ww).unwrap().data(), &flat(&ew), TOL, "width");
}

/// Wave mixing written as one explicit loop nest per axis.
fn wave_oracle(xh: &Grid, xw: &Grid, wts: &MsrbWeights) -> Grid {
    let (b, c, h, w) = (xh.len(), xh[0].len(), xh[0][0].len(), xh[0][0][0].len());
    let mut acc = vec![vec![vec![vec![0.0; w]; h]; c]; b];
    for (x, is_height) in [(xh, true), (xw, false)] {
        let z = pointwise(x, &wts.channel_fc);
        let th = pointwise(x, &wts.phase_fc);
        let (at, ai) = if is_height {
            (&wts.amp_t.height, &wts.amp_i.height)
        } else {
            (&wts.amp_t.width, &wts.amp_i.width)
        };
        for bi in 0..b {
            for ci in 0..c {
                for y in 0..h {
                    for xx in 0..w {
                        let mut s = 0.0;
                        if is_height {
                            for j in 0..h {
                                let (zz, t) = (z[bi][ci][j][xx], th[bi][ci][j][xx]);
                                s += at.w[y * h + j] * zz * t.cos() + ai.w[y * h + j] * zz * t.sin();
                            }
                            s += at.bias[y] + ai.bias[y];
                        } else {
                            for j in 0..w {
                                let (zz, t) = (z[bi][ci][y][j], th[bi][ci][y][j]);
                                s += at.w[xx * w + j] * zz * t.cos() + ai.w[xx * w + j] * zz * t.sin();
                            }
                            s += at.bias[xx] + ai.bias[xx];
                        }
                        acc[bi][ci][y][xx] += s;
                    }
                }
            }
        }
    }
    pointwise(&acc, &wts.fuse)
}

fn add(a: &Grid, b: &Grid) -> Grid {
    let fa = flat(a);
    let fb = flat(b);
    let sum: Vec<f64> = fa.iter().zip(&fb).map(|(x, y)| x + y).collect();
    let dims = [a.len(), a[0].len(), a[0][0].len(), a[0][0][0].len()];
    grid(&FeatureMap::new(dims, sum).unwrap())
}

#[test]
fn patm_and_madm_match_composition_oracles() {
    let shape = MsrbShape::new(3, 0, 4, 6);
    let wts = MsrbWeights::random(shape, 60);
    let f = FeatureMap::<f64>::random([2, 3, 4, 6], 61).unwrap();
    let g = grid(&f);
    assert_close(patm_fuse(&f, &wts).unwrap().data(), &flat(&wave_oracle(&g, &g, &wts)), 1e-12, "patm");

    let xh = grid(&axial_fc(&f, Axis::Height, &wts.axial_h).unwrap());
    let xw = grid(&axial_fc(&f, Axis::Width, &wts.axial_w).unwrap());
    let expected = add(&g, &wave_oracle(&xh, &xw, &wts));
    assert_close(madm(&f, &wts).unwrap().data(), &flat(&expected), 1e-12, "madm");
}

fn gelu_series(x: f64) -> f64 {
    // erf by its Maclaurin series; fine for |x| < 3.
    let z = x / std::f64::consts::SQRT_2;
    let mut term = z;
    let mut sum = z;
    for n in 1..80 {
        term *= -z * z / n as f64;
        sum += term / (2 * n + 1) as f64;
    }
    0.5 * x * (1.0 + 2.0 / std::f64::consts::PI.sqrt() * sum)
}

#[test]
fn ffn_matches_oracle() {
    let wts = MsrbWeights::random(MsrbShape::new(4, 0, 3, 3), 70);
    let f = FeatureMap::<f64>::random([1, 4, 3, 3], 71).unwrap();
    let g = grid(&f);
    let hidden = pointwise(&g, &wts.ffn.fc1);
    let hidden = grid(&FeatureMap::new([1, 8, 3, 3], flat(&hidden).into_iter().map(gelu_series).collect()).unwrap());
    let expected = add(&g, &pointwise(&hidden, &wts.ffn.fc2));
    assert_close(mlp_ffn(&f, &wts).unwrap().data(), &flat(&expected), 1e-12, "ffn");
}

fn sig(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// Hand-rolled LSTM over one sequence; returns every hidden state.
fn lstm_oracle(p: &pixgraph::msrb::LstmParams, xs: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let hs = p.hidden_size();
    let (mut h, mut c) = (vec![0.0; hs], vec![0.0; hs]);
    let mut states = Vec::new();
    for x in xs {
        let mut gates = vec![0.0; 4 * hs];
        for (r, g) in gates.iter_mut().enumerate() {
            *g = p.input.bias[r];
            for (j, xv) in x.iter().enumerate() {
                *g += p.input.w[r * x.len() + j] * xv;
            }
            for (j, hv) in h.iter().enumerate() {
                *g += p.hidden.w[r * hs + j] * hv;
            }
        }
        for u in 0..hs {
            c[u] = sig(gates[hs + u]) * c[u] + sig(gates[u]) * gates[2 * hs + u].tanh();
            h[u] = sig(gates[3 * hs + u]) * c[u].tanh();
        }
        states.push(h.clone());
    }
    states
}

#[test]
fn blstm_matches_sequence_oracle() {
    let wts = MsrbWeights::random(MsrbShape::new(3, 2, 2, 5), 80);
    let f = FeatureMap::<f64>::random([2, 5, 2, 5], 81).unwrap();
    let g = grid(&f);
    let mut expected = vec![vec![vec![vec![0.0; 5]; 2]; 3]; 2];
    for b in 0..2 {
        for y in 0..2 {
            let xs: Vec<Vec<f64>> = (0..5).map(|x| (0..5).map(|c| g[b][c][y][x]).collect()).collect();
            let fwd = lstm_oracle(&wts.lstm_fwd, &xs);
            let rev: Vec<Vec<f64>> = xs.iter().rev().cloned().collect();
            let mut bwd = lstm_oracle(&wts.lstm_bwd, &rev);
            bwd.reverse();
            for x in 0..5 {
                let s: Vec<f64> = fwd[x].iter().zip(&bwd[x]).map(|(a, b)| a + b).collect();
                for (o, v) in matvec(&wts.proj, &s).into_iter().enumerate() {
                    expected[b][o][y][x] = v;
                }
            }
        }
    }
    assert_close(blstm_forward(&f, &wts).unwrap().data(), &flat(&expected), 1e-12, "blstm");
}

#[test]
fn msrb_is_the_documented_composition() {
    let wts = MsrbWeights::random(MsrbShape::new(3, 2, 4, 4), 90);
    let f = FeatureMap::<f64>::random([1, 3, 4, 4], 91).unwrap();
    let clue = FeatureMap::<f64>::random([1, 2, 4, 4], 92).unwrap();
    let manual = blstm_forward(&mlp_ffn(&madm(&f, &wts).unwrap(), &wts).unwrap().concat_channels(&clue).unwrap(), &wts).unwrap();
    let out = msrb_forward(&f, &ClueMap::new(clue), &wts).unwrap();
    assert!(out.bit_eq(&manual));
}

#[test]
fn hog_step_edge_counts() {
    // Vertical edge at x = 8: only columns 7 and 8 see a horizontal gradient.
    let params = HogParams {
        gamma: None,
        ..HogParams::default()
    };
    let img = FeatureMap::from_fn([1, 1, 16, 16], |_, _, _, x| if x < 8 { 0.0 } else { 1.0 }).unwrap();
    let d = hog(&img, &params).unwrap();
    for cy in 0..2 {
        for cx in 0..2 {
            // 8 rows × 1 edge column each side, counts then L2-normalised.
            let raw = 8.0f64;
            let expected = raw / (raw * raw + params.epsilon * params.epsilon).sqrt();
            assert!((d.cell(cy, cx)[0] - expected).abs() < 1e-15);
            assert!(d.cell(cy, cx)[1..].iter().all(|&v| v == 0.0));
        }
    }
    // Horizontal edge: gradient points along y, angle π/2, bin 4 of 9.
    let img = FeatureMap::from_fn([1, 1, 16, 16], |_, _, y, _| if y < 8 { 0.0 } else { 1.0 }).unwrap();
    let d = hog(&img, &params).unwrap();
    assert!(d.cell(0, 1)[4] > 0.99 && d.cell(0, 1).iter().filter(|&&v| v != 0.0).count() == 1);
}

#[test]
fn pix_loss_matches_hand_values() {
    let a = FeatureMap::new([1, 1, 1, 4], vec![0.0, 1.0, 2.0, 3.0]).unwrap();
    let b = FeatureMap::new([1, 1, 1, 4], vec![1.0, 1.0, 0.0, 3.0]).unwrap();
    assert_eq!(pix_loss(&a, &b, PixReduction::Norm).unwrap(), 5f64.sqrt());
    assert_eq!(pix_loss(&a, &b, PixReduction::Mean).unwrap(), 1.25);
}

#[test]
fn cost_models_match_shape_arithmetic() {
    let cfg = WindowConfig::new(3).unwrap();
    let (c, n) = (16u64, 4096u64);
    assert_eq!(flops_estimate(AttentionKind::Pam, 1, 16, 64, 64, cfg), 2 * n * 9 * c);
    assert_eq!(flops_estimate(AttentionKind::Global, 1, 16, 64, 64, cfg), 2 * n * n * c);
    let pam = track_bytes(AttentionKind::Pam, 1, 16, 64, 64, cfg, 4);
    assert!(pam >= 4 * (n * c + 2 * n * c * 9 + n * 9));
    let global = track_bytes(AttentionKind::Global, 1, 16, 64, 64, cfg, 4);
    assert!(global >= 4 * n * n);
    assert_eq!(track_bytes(AttentionKind::Global, 0, 16, 64, 64, cfg, 4), 0);
}

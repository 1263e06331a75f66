mod common;

use common::{project, random_matrix, rng, FdReport, FD_STEP};
use gnn_dti::error::Error;
use gnn_dti::gat::{gat_forward, gat_forward_traced, BoundGat, GatParams};
use gnn_dti::math::{Matrix, Tape};

fn params(f: usize, seed: u64) -> GatParams {
    GatParams::init(f, &mut rng(seed))
}

/// Symmetric adjacency with unit diagonal and a few weighted edges.
fn random_adjacency(n: usize, seed: u64) -> Matrix {
    let mut r = rng(seed);
    let w = random_matrix(n, n, 0.0, 1.0, &mut r);
    Matrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            let (a, b) = (i.min(j), i.max(j));
            let v = w[(a, b)];
            if v > 0.5 { v } else { 0.0 }
        }
    })
}

fn run(x: &Matrix, a: &Matrix, p: &GatParams) -> Matrix {
    let tape = Tape::new();
    let out = gat_forward(tape.constant(x.clone()), tape.constant(a.clone()), &p.bind(&tape)).unwrap();
    let v = out.value().clone();
    v
}

/// Straight-line evaluation of the layer with nested loops.
fn oracle(x: &[Vec<f64>], a: &[Vec<f64>], w: &[Vec<f64>], e: &[Vec<f64>], u: &[f64], b: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let f = w.len();
    let xt: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..f).map(|c| (0..f).map(|k| x[i][k] * w[k][c]).sum()).collect())
        .collect();
    let bil = |p: &[f64], q: &[f64]| -> f64 {
        let mut s = 0.0;
        for r in 0..f {
            for c in 0..f {
                s += p[r] * e[r][c] * q[c];
            }
        }
        s
    };
    let mut out = vec![vec![0.0; f]; n];
    for i in 0..n {
        let nb: Vec<usize> = (0..n).filter(|&j| a[i][j] > 0.0).collect();
        let scores: Vec<f64> = nb.iter().map(|&j| bil(&xt[i], &xt[j]) + bil(&xt[j], &xt[i])).collect();
        let denom: f64 = scores.iter().map(|s| s.exp()).sum();
        let mut agg = vec![0.0; f];
        for (&j, s) in nb.iter().zip(&scores) {
            let coef = s.exp() / denom * a[i][j];
            for c in 0..f {
                agg[c] += coef * xt[j][c];
            }
        }
        let mut g = b;
        for k in 0..f {
            g += u[k] * x[i][k] + u[f + k] * xt[i][k];
        }
        let z = 1.0 / (1.0 + (-g).exp());
        for c in 0..f {
            out[i][c] = z * xt[i][c] + (1.0 - z) * agg[c];
        }
    }
    out
}

fn rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

#[test]
fn zero_input_gives_zero_output() {
    let p = params(4, 1);
    let a = random_adjacency(5, 2);
    let out = run(&Matrix::zeros(5, 4), &a, &p);
    assert!(out.data().iter().all(|&v| v == 0.0));
}

#[test]
fn single_node_passes_transformed_features() {
    let p = params(3, 3);
    let x = Matrix::from_rows(&[[0.3, -1.2, 0.7]]);
    let out = run(&x, &Matrix::from_rows(&[[1.0]]), &p);
    let xw = x.matmul(&p.w).unwrap();
    assert!(out.max_abs_diff(&xw) <= 1e-15);
}

#[test]
fn three_node_path_matches_loop_oracle() {
    let p = GatParams {
        w: Matrix::from_rows(&[[0.5, -0.3], [0.2, 0.8]]),
        e: Matrix::from_rows(&[[0.1, 0.4], [-0.6, 0.3]]),
        u: Matrix::from_rows(&[[0.7], [-0.2], [0.5], [0.1]]),
        b: Matrix::scalar(-0.3),
    };
    let x = Matrix::from_rows(&[[1.0, 0.0], [0.5, -1.0], [-0.4, 2.0]]);
    let a = Matrix::from_rows(&[[1.0, 1.0, 0.0], [1.0, 1.0, 0.6], [0.0, 0.6, 1.0]]);
    let got = run(&x, &a, &p);
    let want = oracle(
        &rows(&x),
        &rows(&a),
        &rows(&p.w),
        &rows(&p.e),
        p.u.data(),
        p.b.item(),
    );
    for i in 0..3 {
        for c in 0..2 {
            assert!((got[(i, c)] - want[i][c]).abs() <= 1e-10, "({i},{c})");
        }
    }
}

#[test]
fn random_graph_matches_loop_oracle() {
    let p = params(6, 4);
    let x = random_matrix(7, 6, -1.0, 1.0, &mut rng(5));
    let a = random_adjacency(7, 6);
    let got = run(&x, &a, &p);
    let want = oracle(&rows(&x), &rows(&a), &rows(&p.w), &rows(&p.e), p.u.data(), p.b.item());
    for i in 0..7 {
        for c in 0..6 {
            assert!((got[(i, c)] - want[i][c]).abs() <= 1e-10);
        }
    }
}

#[test]
fn permuting_nodes_permutes_output() {
    let p = params(5, 7);
    let x = random_matrix(6, 5, -1.0, 1.0, &mut rng(8));
    let a = random_adjacency(6, 9);
    let perm = [3, 0, 5, 1, 4, 2];
    let px = Matrix::from_fn(6, 5, |i, c| x[(perm[i], c)]);
    let pa = Matrix::from_fn(6, 6, |i, j| a[(perm[i], perm[j])]);
    let out = run(&x, &a, &p);
    let pout = run(&px, &pa, &p);
    for i in 0..6 {
        for c in 0..5 {
            assert!((pout[(i, c)] - out[(perm[i], c)]).abs() <= 1e-10);
        }
    }
}

#[test]
fn trace_properties() {
    let p = params(4, 10);
    let x = random_matrix(6, 4, -2.0, 2.0, &mut rng(11));
    let a = random_adjacency(6, 12);
    let tape = Tape::new();
    let t = gat_forward_traced(tape.constant(x), tape.constant(a.clone()), &p.bind(&tape)).unwrap();
    let e = t.scores.value().clone();
    assert_eq!(e, e.transpose(), "scores must be exactly symmetric");
    let gate = t.gate.value().clone();
    assert!(gate.data().iter().all(|&z| z > 0.0 && z < 1.0));
    let att = t.attention.value().clone();
    for i in 0..6 {
        let sum: f64 = (0..6).filter(|&j| a[(i, j)] > 0.0).map(|j| att[(i, j)]).sum();
        assert!((sum - 1.0).abs() <= 1e-12);
        for j in 0..6 {
            if a[(i, j)] == 0.0 {
                assert_eq!(att[(i, j)], 0.0);
            }
        }
    }
}

#[test]
fn equal_adjacencies_give_identical_outputs() {
    let p = params(4, 13);
    let x = random_matrix(5, 4, -1.0, 1.0, &mut rng(14));
    let a = random_adjacency(5, 15);
    let b = a.clone();
    assert_eq!(run(&x, &a, &p), run(&x, &b, &p));
}

#[test]
fn missing_self_loop_and_bad_shapes_are_errors() {
    let p = params(3, 16);
    let tape = Tape::new();
    let bound = p.bind(&tape);
    let x = tape.constant(Matrix::zeros(2, 3));
    let a = tape.constant(Matrix::from_rows(&[[1.0, 1.0], [1.0, 0.0]]));
    assert!(matches!(gat_forward(x, a, &bound), Err(Error::MissingSelfLoop { row: 1 })));
    let wide = tape.constant(Matrix::zeros(2, 4));
    let ok_a = tape.constant(Matrix::identity(2));
    assert!(matches!(gat_forward(wide, ok_a, &bound), Err(Error::Shape { .. })));
    let big_a = tape.constant(Matrix::identity(3));
    assert!(matches!(gat_forward(x, big_a, &bound), Err(Error::Shape { .. })));
}

fn layer_loss<'t>(v: &[gnn_dti::math::Var<'t>]) -> gnn_dti::math::Var<'t> {
    let bound = BoundGat {
        w: v[2],
        e: v[3],
        u: v[4],
        b: v[5],
    };
    project(gat_forward(v[0], v[1], &bound).unwrap(), 20)
}

#[test]
fn gradients_reach_weights_and_inputs() {
    let p = params(3, 17);
    let x = random_matrix(5, 3, -1.0, 1.0, &mut rng(18));
    let a = random_adjacency(5, 19);
    let inputs = vec![x, a, p.w.clone(), p.e.clone(), p.u.clone(), p.b.clone()];
    // Zero adjacency entries sit outside the neighbourhood; nudging one adds
    // a neighbour, so only nonzero entries are differentiated.
    let mut fixed = FdReport::default();
    let tape = Tape::new();
    let vars: Vec<_> = inputs.iter().map(|m| tape.param(m.clone())).collect();
    let grads = tape.backward(layer_loss(&vars)).unwrap();
    let eval = |ms: &[Matrix]| {
        let t = Tape::new();
        let vs: Vec<_> = ms.iter().map(|m| t.param(m.clone())).collect();
        let v = layer_loss(&vs).value().item();
        v
    };
    let mut nonzero_a = 0;
    for (k, m) in inputs.iter().enumerate() {
        let g = grads.get_or_zeros(vars[k]);
        for e in 0..m.len() {
            if k == 1 && m.data()[e] == 0.0 {
                continue;
            }
            if k == 1 {
                nonzero_a += 1;
            }
            let mut plus = inputs.clone();
            plus[k].data_mut()[e] += FD_STEP;
            let mut minus = inputs.clone();
            minus[k].data_mut()[e] -= FD_STEP;
            let numeric = (eval(&plus) - eval(&minus)) / (2.0 * FD_STEP);
            fixed.record(g.data()[e], numeric, || format!("input {k} entry {e}"));
        }
    }
    assert!(nonzero_a > 5, "adjacency needs off-diagonal edges");
    assert!(fixed.worst <= 1e-4, "worst {} at {}", fixed.worst, fixed.at);
}

//! Reverse-mode gradients on a small expression, checked against central
//! differences.

use gnn_dti::math::{Matrix, Tape};

fn loss(w: &Matrix, x: &Matrix) -> (f64, Matrix) {
    let tape = Tape::new();
    let wv = tape.param(w.clone());
    let xv = tape.constant(x.clone());
    let out = xv.matmul(wv).unwrap().sigmoid().sum();
    let value = out.value().item();
    let grads = tape.backward(out).unwrap();
    (value, grads.get(wv).unwrap().clone())
}

fn main() {
    let x = Matrix::from_rows(&[[0.5, -1.0], [2.0, 0.25], [-0.3, 0.8]]);
    let w = Matrix::from_rows(&[[0.1, -0.4], [0.7, 0.2]]);
    let (value, grad) = loss(&w, &x);
    println!("loss = {value:.6}");

    let h = 1e-6;
    for k in 0..w.len() {
        let mut plus = w.clone();
        plus.data_mut()[k] += h;
        let mut minus = w.clone();
        minus.data_mut()[k] -= h;
        let numeric = (loss(&plus, &x).0 - loss(&minus, &x).0) / (2.0 * h);
        println!("dW[{k}]  analytic {:+.8}  numeric {:+.8}", grad.data()[k], numeric);
    }
}

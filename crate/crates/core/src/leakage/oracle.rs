//! Entropies and mutual information of small discrete joint distributions by
//! direct summation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const MASS_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MiReport {
    pub h_x: f64,
    pub h_x_given_y: f64,
    pub mi: f64,
}

/// `I(X; Y1, Y2)` split by the chain rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThreeWayMi {
    pub joint: f64,
    pub first: f64,
    pub conditional: f64,
}

/// Shannon entropy in bits; zero cells contribute nothing.
pub fn entropy(p: &[f64]) -> f64 {
    -p.iter().filter(|&&x| x > 0.0).map(|&x| x * x.log2()).sum::<f64>()
}

fn check_mass<'a>(cells: impl Iterator<Item = &'a f64>) -> Result<()> {
    let mut sum = 0.0;
    for &p in cells {
        if !(p >= 0.0) || !p.is_finite() {
            return Err(Error::param("joint", "probabilities must be finite and non-negative"));
        }
        sum += p;
    }
    if (sum - 1.0).abs() > MASS_TOLERANCE {
        return Err(Error::param("joint", format!("total mass {sum}, expected 1")));
    }
    Ok(())
}

/// `H(X)`, `H(X|Y)` and `I(X;Y)` for `joint[x][y] = p(x, y)`.
///
/// `I` is summed directly as `Σ p(x,y) log p(x,y) / (p(x) p(y))`, and
/// `H(X|Y)` as `−Σ p(x,y) log p(x|y)`; the two agree with
/// `I = H(X) − H(X|Y)` up to rounding.
pub fn discrete_mi_oracle(joint: &[Vec<f64>]) -> Result<MiReport> {
    let ny = joint.first().map_or(0, Vec::len);
    if joint.is_empty() || ny == 0 || joint.iter().any(|r| r.len() != ny) {
        return Err(Error::param("joint", "must be a non-empty rectangular table"));
    }
    check_mass(joint.iter().flatten())?;
    let px: Vec<f64> = joint.iter().map(|r| r.iter().sum()).collect();
    let py: Vec<f64> = (0..ny).map(|y| joint.iter().map(|r| r[y]).sum()).collect();

    let mut mi = 0.0;
    let mut h_x_given_y = 0.0;
    for (x, row) in joint.iter().enumerate() {
        for (y, &p) in row.iter().enumerate() {
            if p > 0.0 {
                mi += p * (p / (px[x] * py[y])).log2();
                h_x_given_y -= p * (p / py[y]).log2();
            }
        }
    }
    Ok(MiReport { h_x: entropy(&px), h_x_given_y, mi })
}

/// `I(X;Y1,Y2)`, `I(X;Y1)` and `I(X;Y2|Y1)` for `joint[x][y1][y2]`, each from
/// entropies of the appropriate marginals.
pub fn three_way_mi(joint: &[Vec<Vec<f64>>]) -> Result<ThreeWayMi> {
    let n1 = joint.first().map_or(0, Vec::len);
    let n2 = joint.first().and_then(|r| r.first()).map_or(0, Vec::len);
    if joint.is_empty() || n1 == 0 || n2 == 0 || joint.iter().any(|r| r.len() != n1 || r.iter().any(|c| c.len() != n2)) {
        return Err(Error::param("joint", "must be a non-empty rectangular table"));
    }
    check_mass(joint.iter().flatten().flatten())?;

    let nx = joint.len();
    let mut px = vec![0.0; nx];
    let mut p1 = vec![0.0; n1];
    let mut px1 = vec![0.0; nx * n1];
    let mut p12 = vec![0.0; n1 * n2];
    let mut pxyz = Vec::with_capacity(nx * n1 * n2);
    for (x, plane) in joint.iter().enumerate() {
        for (a, row) in plane.iter().enumerate() {
            for (b, &p) in row.iter().enumerate() {
                px[x] += p;
                p1[a] += p;
                px1[x * n1 + a] += p;
                p12[a * n2 + b] += p;
                pxyz.push(p);
            }
        }
    }
    let (hx, h1, hx1, h12, hxyz) = (entropy(&px), entropy(&p1), entropy(&px1), entropy(&p12), entropy(&pxyz));
    Ok(ThreeWayMi {
        joint: hx + h12 - hxyz,
        first: hx + h1 - hx1,
        conditional: hx1 + h12 - h1 - hxyz,
    })
}

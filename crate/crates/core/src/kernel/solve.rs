use super::{augment_with_background, AttributedGraph, KernelConfig};
use crate::error::{Error, Result};

/// Implicit product operator for one graph pair.
pub(crate) struct Product {
    pub n1: usize,
    pub n2: usize,
    a1: Vec<(usize, usize, f64)>,
    a2: Vec<(usize, usize, f64)>,
    /// Diagonal of `N`, row-major over `(a, b)`.
    pub nx: Vec<f64>,
    /// Sorted union of attribute labels.
    pub vocab: Vec<String>,
    /// `n1 x m` and `n2 x m` dense attribute matrices over `vocab`.
    pub attrs1: Vec<f64>,
    pub attrs2: Vec<f64>,
}

fn nonzeros(g: &AttributedGraph) -> Vec<(usize, usize, f64)> {
    let n = g.node_count();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let v = g.adjacency.get(i, j);
            if v != 0.0 {
                out.push((i, j, v));
            }
        }
    }
    out
}

fn dense_attributes(g: &AttributedGraph, vocab: &[String]) -> Vec<f64> {
    let m = vocab.len();
    let mut out = vec![0.0; g.node_count() * m];
    for (i, row) in g.attributes.iter().enumerate() {
        for (label, &v) in row {
            let l = vocab.binary_search(label).expect("label in vocabulary");
            out[i * m + l] = v;
        }
    }
    out
}

impl Product {
    pub fn new(g1: &AttributedGraph, g2: &AttributedGraph) -> Product {
        let mut vocab: Vec<String> = g1
            .attribute_labels()
            .union(&g2.attribute_labels())
            .map(|s| (*s).to_owned())
            .collect();
        vocab.sort();
        let (n1, n2, m) = (g1.node_count(), g2.node_count(), vocab.len());
        let attrs1 = dense_attributes(g1, &vocab);
        let attrs2 = dense_attributes(g2, &vocab);
        let mut nx = vec![0.0; n1 * n2];
        for a in 0..n1 {
            for b in 0..n2 {
                nx[a * n2 + b] = (0..m).map(|l| attrs1[a * m + l] * attrs2[b * m + l]).sum();
            }
        }
        Product {
            n1,
            n2,
            a1: nonzeros(g1),
            a2: nonzeros(g2),
            nx,
            vocab,
            attrs1,
            attrs2,
        }
    }

    pub fn dim(&self) -> usize {
        self.n1 * self.n2
    }

    /// `out = (A1 (x) A2) x`, or its transpose.
    pub fn kron(&self, x: &[f64], out: &mut [f64], transpose: bool) {
        let (n1, n2) = (self.n1, self.n2);
        let mut t = vec![0.0; n1 * n2];
        // T = X A2' (or X A2 when transposed)
        for &(r, s, v) in &self.a2 {
            let (b, bp) = if transpose { (s, r) } else { (r, s) };
            for a in 0..n1 {
                t[a * n2 + b] += v * x[a * n2 + bp];
            }
        }
        out.iter_mut().for_each(|o| *o = 0.0);
        // R = A1 T (or A1' T)
        for &(r, s, v) in &self.a1 {
            let (a, ap) = if transpose { (s, r) } else { (r, s) };
            let (dst, src) = (a * n2, ap * n2);
            for b in 0..n2 {
                out[dst + b] += v * t[src + b];
            }
        }
    }

    /// Max row sum of `|N A|`.
    pub fn row_sum_bound(&self) -> f64 {
        let ones = vec![1.0; self.dim()];
        let mut ax = vec![0.0; self.dim()];
        self.abs_product().kron(&ones, &mut ax, false);
        ax.iter()
            .zip(&self.nx)
            .map(|(r, n)| r * n.abs())
            .fold(0.0, f64::max)
    }

    /// Max row sum of `|A' N|`, the left iteration's operator.
    fn left_row_sum_bound(&self) -> f64 {
        let n_abs: Vec<f64> = self.nx.iter().map(|v| v.abs()).collect();
        let mut out = vec![0.0; self.dim()];
        self.abs_product().kron(&n_abs, &mut out, true);
        out.into_iter().fold(0.0, f64::max)
    }

    fn abs_product(&self) -> Product {
        let abs = |v: &Vec<(usize, usize, f64)>| v.iter().map(|&(i, j, x)| (i, j, x.abs())).collect();
        Product {
            n1: self.n1,
            n2: self.n2,
            a1: abs(&self.a1),
            a2: abs(&self.a2),
            nx: Vec::new(),
            vocab: Vec::new(),
            attrs1: Vec::new(),
            attrs2: Vec::new(),
        }
    }

    pub fn uniform(&self) -> Vec<f64> {
        vec![1.0 / self.dim() as f64; self.dim()]
    }

    /// `y = (I - c N A)^-1 N p`.
    pub fn solve_right(&self, c: f64, p: &[f64], cfg: &KernelConfig) -> Result<(Vec<f64>, usize)> {
        let b: Vec<f64> = p.iter().zip(&self.nx).map(|(p, n)| p * n).collect();
        let rho = c * self.row_sum_bound();
        fixed_point(&b, c, rho, cfg, |x, out| {
            self.kron(x, out, false);
            out.iter_mut().zip(&self.nx).for_each(|(o, n)| *o *= n);
        })
    }

    /// `z = (I - c A' N)^-1 q`, so that `Sim = z' N p`.
    pub fn solve_left(&self, c: f64, q: &[f64], cfg: &KernelConfig) -> Result<(Vec<f64>, usize)> {
        let rho = c * self.left_row_sum_bound();
        let mut nz = vec![0.0; self.dim()];
        fixed_point(q, c, rho, cfg, |x, out| {
            nz.iter_mut()
                .zip(x.iter().zip(&self.nx))
                .for_each(|(d, (x, n))| *d = x * n);
            self.kron(&nz, out, true);
        })
    }
}

/// Iterates `x <- b + c M x` where `step` writes `M x`.
///
/// Stops once the a-posteriori bound `rho/(1-rho) * |dx|` falls below
/// `tolerance * |x|` (max norms); with `rho >= 1` the raw step size is used.
fn fixed_point(
    b: &[f64],
    c: f64,
    rho: f64,
    cfg: &KernelConfig,
    mut step: impl FnMut(&[f64], &mut [f64]),
) -> Result<(Vec<f64>, usize)> {
    let mut x = b.to_vec();
    let mut mx = vec![0.0; b.len()];
    if c == 0.0 {
        return Ok((x, 0));
    }
    for it in 1..=cfg.max_iterations {
        step(&x, &mut mx);
        let mut delta: f64 = 0.0;
        let mut norm: f64 = 0.0;
        for ((xi, bi), mi) in x.iter_mut().zip(b).zip(&mx) {
            let next = bi + c * mi;
            delta = delta.max((next - *xi).abs());
            norm = norm.max(next.abs());
            *xi = next;
        }
        if !delta.is_finite() {
            break;
        }
        let err = if rho < 1.0 { rho / (1.0 - rho) * delta } else { delta };
        if delta == 0.0 || err <= cfg.tolerance * norm {
            return Ok((x, it));
        }
    }
    Err(Error::SingularSystem {
        decay: c,
        spectral_bound: rho,
        iterations: cfg.max_iterations,
    })
}

/// Result of one kernel evaluation; `graphs` are the (possibly augmented) operands.
#[derive(Debug, Clone)]
pub struct KernelEvaluation {
    pub similarity: f64,
    pub decay: f64,
    pub iterations: usize,
    pub graphs: (AttributedGraph, AttributedGraph),
}

pub(crate) fn prepare(g1: &AttributedGraph, g2: &AttributedGraph, cfg: &KernelConfig) -> Result<(AttributedGraph, AttributedGraph)> {
    if g1.node_count() == 0 || g2.node_count() == 0 {
        return Err(Error::InvalidParameter("kernel operands must have at least one node".into()));
    }
    if !(cfg.tolerance > 0.0) || cfg.max_iterations == 0 {
        return Err(Error::InvalidParameter("kernel tolerance and iteration cap must be positive".into()));
    }
    Ok(if cfg.background {
        augment_with_background(g1, g2)
    } else {
        (g1.clone(), g2.clone())
    })
}

/// Default decay `min(0.9 / ub, 0.9)`, or the configured one after a range check.
pub(crate) fn decay(product: &Product, cfg: &KernelConfig) -> Result<f64> {
    match cfg.decay {
        Some(c) if (0.0..1.0).contains(&c) => Ok(c),
        Some(c) => Err(Error::InvalidParameter(format!("decay {c} outside [0, 1)"))),
        None => Ok(default_decay(product.row_sum_bound())),
    }
}

/// `min(0.9 / ub, 0.9)`, or 0.9 when `ub` is 0.
pub fn default_decay(ub: f64) -> f64 {
    if ub > 0.0 {
        (0.9 / ub).min(0.9)
    } else {
        0.9
    }
}

/// Max row sum `ub` of `N A` for the pair, after optional background augmentation.
pub fn decay_bound(g1: &AttributedGraph, g2: &AttributedGraph, cfg: &KernelConfig) -> Result<f64> {
    let (g1, g2) = prepare(g1, g2, cfg)?;
    Ok(Product::new(&g1, &g2).row_sum_bound())
}

/// `q'(I - c N A)^-1 N p` with uniform `q` and `p`.
pub fn kernel_similarity(g1: &AttributedGraph, g2: &AttributedGraph, cfg: &KernelConfig) -> Result<KernelEvaluation> {
    let (g1, g2) = prepare(g1, g2, cfg)?;
    let product = Product::new(&g1, &g2);
    let c = decay(&product, cfg)?;
    let p = product.uniform();
    let (y, iterations) = product.solve_right(c, &p, cfg)?;
    let similarity = p.iter().zip(&y).map(|(q, y)| q * y).sum();
    Ok(KernelEvaluation {
        similarity,
        decay: c,
        iterations,
        graphs: (g1, g2),
    })
}

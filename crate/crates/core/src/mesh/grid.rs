//! Structured quad grids used by tests, 1D benchmarks and the boundary-layer
//! harness.

use super::{Element, ElementKind, Mesh2D};

/// Tensor-product grid over the given coordinate lines (both strictly
/// increasing). One region, `base`. Node and edge sets `left`, `right`,
/// `bottom`, `top`.
pub fn tensor(xs: &[f64], ys: &[f64]) -> Mesh2D {
    assert!(xs.len() >= 2 && ys.len() >= 2);
    let nx = xs.len() - 1;
    let ny = ys.len() - 1;
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
    for &y in ys {
        for &x in xs {
            nodes.push([x, y]);
        }
    }
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            let ids = [id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)];
            elements.push(Element::new(ElementKind::Quad4, &ids, 0));
        }
    }
    let mut m = Mesh2D::new(nodes, elements, vec!["base".into()]).expect("valid tensor grid");
    let el = |i: usize, j: usize| j * nx + i;
    let sets: [(&str, Vec<usize>, Vec<(usize, usize)>); 4] = [
        ("bottom", (0..=nx).map(|i| id(i, 0)).collect(), (0..nx).map(|i| (el(i, 0), 0)).collect()),
        ("right", (0..=ny).map(|j| id(nx, j)).collect(), (0..ny).map(|j| (el(nx - 1, j), 1)).collect()),
        ("top", (0..=nx).map(|i| id(i, ny)).collect(), (0..nx).map(|i| (el(i, ny - 1), 2)).collect()),
        ("left", (0..=ny).map(|j| id(0, j)).collect(), (0..ny).map(|j| (el(0, j), 3)).collect()),
    ];
    for (name, ns, es) in sets {
        m.add_node_set(name, ns).expect("fresh set");
        m.add_edge_set(name, es).expect("fresh set");
    }
    m
}

/// Uniform `nx` x `ny` grid on [x0, x1] x [y0, y1].
pub fn rectangle(x0: f64, x1: f64, y0: f64, y1: f64, nx: usize, ny: usize) -> Mesh2D {
    tensor(&linspace(x0, x1, nx), &linspace(y0, y1, ny))
}

/// `n + 1` equally spaced points from a to b (end points exact).
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    assert!(n >= 1);
    (0..=n)
        .map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 })
        .collect()
}

/// Coordinates from `a` to `b` with spacing `h` inside [fine_lo, fine_hi]
/// and geometric growth (factor `ratio`, capped at `h_max`) outside it.
pub fn graded_line(a: f64, b: f64, fine_lo: f64, fine_hi: f64, h: f64, ratio: f64, h_max: f64) -> Vec<f64> {
    assert!(a <= fine_lo && fine_lo < fine_hi && fine_hi <= b && h > 0.0 && ratio >= 1.0);
    let n_fine = ((fine_hi - fine_lo) / h).round().max(1.0) as usize;
    let mut pts = linspace(fine_lo, fine_hi, n_fine);
    let grow = |from: f64, to: f64| -> Vec<f64> {
        // Points strictly beyond `from` towards `to`, last one equal to `to`.
        let len = (to - from).abs();
        if len <= 1e-12 {
            return Vec::new();
        }
        let dir = (to - from).signum();
        let mut steps = Vec::new();
        let mut s = h;
        let mut acc = 0.0;
        while acc + s < len {
            s = (s * ratio).min(h_max);
            steps.push(s);
            acc += s;
        }
        if steps.is_empty() {
            return vec![to];
        }
        // Rescale so the last point lands on `to`.
        let k = len / acc;
        let mut out = Vec::with_capacity(steps.len());
        let mut x = from;
        for st in &steps {
            x += dir * st * k;
            out.push(x);
        }
        *out.last_mut().unwrap() = to;
        out
    };
    let left = grow(fine_lo, a);
    let right = grow(fine_hi, b);
    let mut all: Vec<f64> = left.into_iter().rev().collect();
    all.append(&mut pts);
    all.extend(right);
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rectangle_sets() {
        let m = rectangle(0.0, 3.0, 0.0, 2.0, 3, 2);
        assert_eq!(m.node_count(), 12);
        assert_eq!(m.element_count(), 6);
        assert_eq!(m.node_set("left").unwrap(), &[0, 4, 8]);
        assert_eq!(m.edge_set("top").unwrap().len(), 3);
        let mut ext = m.exterior_edges();
        let mut named: Vec<_> = ["bottom", "right", "top", "left"]
            .iter()
            .flat_map(|s| m.edge_set(s).unwrap().to_vec())
            .collect();
        ext.sort();
        named.sort();
        assert_eq!(ext, named);
    }

    #[test]
    fn graded_line_is_increasing_and_fine_inside() {
        let xs = graded_line(-50.0, 50.0, -0.2, 2.0, 0.01, 1.2, 5.0);
        assert_eq!(xs[0], -50.0);
        assert_eq!(*xs.last().unwrap(), 50.0);
        for w in xs.windows(2) {
            assert!(w[1] > w[0]);
            if w[0] >= -0.2 - 1e-12 && w[1] <= 2.0 + 1e-12 {
                assert!((w[1] - w[0] - 0.01).abs() < 1e-9);
            }
        }
    }
}

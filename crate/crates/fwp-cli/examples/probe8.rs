use fwp::polytope::{facet_enum, vertex_enum};
use fwp::Tolerances;
use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn main() {
    let tol = Tolerances::default();
    let mut rng = StdRng::seed_from_u64(4096);
    for trial in 0..100 {
        let dim = 2 + trial % 5;
        let rows = rng.gen_range(dim + 1..3 * dim + 4);
        let mut a = DMatrix::zeros(rows + 2 * dim, dim);
        let mut b = DVector::zeros(rows + 2 * dim);
        for i in 0..rows {
            let n = loop {
                let v = DVector::from_fn(dim, |_, _| rng.gen_range(-1.0f64..1.0));
                if v.norm() > 0.1 { break v.normalize(); }
            };
            for j in 0..dim { a[(i, j)] = n[j]; }
            b[i] = rng.gen_range(0.4..1.6);
        }
        for j in 0..dim {
            a[(rows + 2 * j, j)] = 1.0;
            b[rows + 2 * j] = 2.0;
            a[(rows + 2 * j + 1, j)] = -1.0;
            b[rows + 2 * j + 1] = 2.0;
        }
        let p = fwp::HPolytope::from_inequalities(a.clone(), b.clone()).unwrap();
        let e1 = vertex_enum(&p, &tol).unwrap();
        let h = facet_enum(&e1.polytope, &tol).unwrap();
        let e2 = vertex_enum(&h, &tol).unwrap();
        let m1 = e1.polytope.num_vertices();
        let m2 = e2.polytope.num_vertices();
        // max distance from each v1 to nearest v2 and vice versa
        let mut worst = 0.0f64;
        for i in 0..m1 {
            let v = e1.polytope.vertex(i);
            let d = (0..m2).map(|j| (e2.polytope.vertex(j) - &v).amax()).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
        for j in 0..m2 {
            let v = e2.polytope.vertex(j);
            let d = (0..m1).map(|i| (e1.polytope.vertex(i) - &v).amax()).fold(f64::INFINITY, f64::min);
            worst = worst.max(d);
        }
        if m1 != m2 || worst > 1e-8 {
            println!("trial {trial} dim {dim}: m1 {m1} m2 {m2} worst match dist {worst:.3e}");
        }
    }
    println!("done");
}

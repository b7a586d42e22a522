use vdsim::graph::{Boundary, SiteLabel, Sublattice};
use vdsim::models::{bloch_gap, build_model, ModelParams};
use vdsim::operator::assemble_bath;
use vdsim::spectra::{diagonalize, eigenvalues_only};

fn main() {
    for (phi, m) in [(-std::f64::consts::PI, -0.8), (0.0, -0.8), (0.0, 0.8), (std::f64::consts::PI, 0.4)] {
        println!("== phi={phi:.3} m={m}");
        for cells in [8usize, 12, 16, 20, 24] {
            let p = ModelParams::Haldane {
                nx: cells, ny: cells, m, t: 0.1, phi, omega_c: 0.0, j: 1.0,
                bc: Boundary::Periodic,
            };
            let gap = bloch_gap(&p, cells * 3).unwrap();
            let bath = build_model(&p).unwrap();
            let center = bath.site_by_label(&SiteLabel { cell: [(cells/2) as i64, (cells/2) as i64], sub: Sublattice::A }).unwrap();
            let vac = bath.remove_site(center).unwrap();
            let vals = eigenvalues_only(&assemble_bath(&vac.bath)).unwrap();
            let ingap: Vec<f64> = vals.iter().cloned()
                .filter(|&v| v > gap.lower_edge() + 0.02*gap.width && v < gap.upper_edge() - 0.02*gap.width)
                .collect();
            print!("  L={cells:2} gap=({:+.4},{:+.4}) ingap: {:?}",
                gap.lower_edge(), gap.upper_edge(),
                ingap.iter().map(|v| format!("{v:+.5}")).collect::<Vec<_>>());
            if !ingap.is_empty() && cells == 16 {
                let es = diagonalize(&assemble_bath(&vac.bath)).unwrap();
                for (k, &v) in es.values().iter().enumerate() {
                    if (v - ingap[0]).abs() < 1e-12 {
                        let ipr: f64 = es.vector(k).iter().map(|c| c.norm_sqr().powi(2)).sum();
                        print!("  ipr={ipr:.4}");
                        let pb: f64 = es.vector(k).iter().enumerate()
                            .filter(|(i, _)| vac.bath.labels().unwrap()[*i].sub == Sublattice::B)
                            .map(|(_, c)| c.norm_sqr()).sum();
                        print!(" P(b)={pb:.4}");
                        break;
                    }
                }
            }
            println!();
        }
    }
}

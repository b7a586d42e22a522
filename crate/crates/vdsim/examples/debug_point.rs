use vdsim::graph::{Boundary, SiteLabel, Sublattice};
use vdsim::models::{bloch_gap, build_model, ModelParams};
use vdsim::operator::assemble_bath;
use vdsim::spectra::eigenvalues_only;

fn main() {
    let t = 0.1;
    for (phi, mt) in [(-std::f64::consts::FRAC_PI_2, -4.0f64), (std::f64::consts::FRAC_PI_2, 4.0), (std::f64::consts::FRAC_PI_2, -4.0)] {
        println!("== phi={phi:+.3} m/t={mt}");
        for cells in [12usize, 16, 20, 28, 36] {
            let p = ModelParams::Haldane { nx: cells, ny: cells, m: mt * t, t, phi, omega_c: 0.0, j: 1.0, bc: Boundary::Periodic };
            let gap = bloch_gap(&p, cells * 3).unwrap();
            let bath = build_model(&p).unwrap();
            for sub in [Sublattice::A, Sublattice::B] {
                let center = bath.site_by_label(&SiteLabel { cell: [(cells/2) as i64, (cells/2) as i64], sub }).unwrap();
                let vac = bath.remove_site(center).unwrap();
                let vals = eigenvalues_only(&assemble_bath(&vac.bath)).unwrap();
                let raw: Vec<String> = vals.iter().cloned()
                    .filter(|&v| v > gap.lower_edge() && v < gap.upper_edge())
                    .map(|v| format!("{:+.4}", v)).collect();
                print!("  L={cells:2} {sub:?} gap=({:+.4},{:+.4}) raw-ingap: {raw:?}", gap.lower_edge(), gap.upper_edge());
                println!();
            }
        }
    }
}

use vdsim::graph::{Boundary, SiteLabel, Sublattice};
use vdsim::models::{bloch_gap, build_model, ModelParams};
use vdsim::operator::assemble_bath;
use vdsim::spectra::eigenvalues_only;

fn main() {
    let t = 0.1;
    let phi = std::f64::consts::FRAC_PI_2;
    for mt in [0.0f64, 1.0, 2.0, 3.0, 3.5, 4.0, 4.5] {
        print!("m/t={mt:+.1}: ");
        for cells in [24usize, 36, 48] {
            let p = ModelParams::Haldane { nx: cells, ny: cells, m: mt * t, t, phi, omega_c: 0.0, j: 1.0, bc: Boundary::Periodic };
            let gap = bloch_gap(&p, cells * 3).unwrap();
            let bath = build_model(&p).unwrap();
            let center = bath.site_by_label(&SiteLabel { cell: [(cells/2) as i64, (cells/2) as i64], sub: Sublattice::A }).unwrap();
            let vac = bath.remove_site(center).unwrap();
            let vals = eigenvalues_only(&assemble_bath(&vac.bath)).unwrap();
            let ingap: Vec<String> = vals.iter().cloned()
                .filter(|&v| v > gap.lower_edge() + 0.02 * gap.width && v < gap.upper_edge() - 0.02 * gap.width)
                .map(|v| format!("{:+.4}", (v - gap.mid) / gap.width)).collect();
            print!(" L{cells}:{ingap:?}");
        }
        println!();
    }
}

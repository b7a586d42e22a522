use rayon::prelude::*;
use vdsim::graph::{Boundary, SiteLabel, Sublattice};
use vdsim::models::{bloch_gap, build_model, ModelParams};
use vdsim::operator::assemble_bath;
use vdsim::spectra::eigenvalues_only;
use vdsim::topo::chern_number;

fn main() {
    let t = 0.1;
    let nphi = 21usize;
    let nmt = 21usize;
    let b = 2.0 * 3.0 * 3.0f64.sqrt();
    let rows: Vec<String> = (0..nphi).into_par_iter().map(|ip| {
        let phi = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * ip as f64 / (nphi - 1) as f64;
        let mut row = String::new();
        for im in 0..nmt {
            let mt = -b + 2.0 * b * im as f64 / (nmt - 1) as f64;
            let p = ModelParams::Haldane { nx: 16, ny: 16, m: mt * t, t, phi, omega_c: 0.0, j: 1.0, bc: Boundary::Periodic };
            let gap = bloch_gap(&p, 48).unwrap();
            if gap.width < 0.03 {
                row.push('.');
                continue;
            }
            let c = chern_number(&p, 24).map(|c| c.abs()).unwrap_or(9);
            let bath = build_model(&p).unwrap();
            let center = bath.site_by_label(&SiteLabel { cell: [8, 8], sub: Sublattice::A }).unwrap();
            let vac = bath.remove_site(center).unwrap();
            let vals = eigenvalues_only(&assemble_bath(&vac.bath)).unwrap();
            let n_in = vals.iter().filter(|&&v| v > gap.lower_edge() + 0.02*gap.width && v < gap.upper_edge() - 0.02*gap.width).count();
            // encode: match = ' ', C=1&bs ok='#', mismatch cases
            let ch = match (c, n_in) {
                (1, 1) => '#',      // topological with BS: consistent
                (0, 0) => ' ',      // trivial without BS: consistent
                (1, 0) => '!',      // topological, BS missing
                (0, n) if n >= 1 => 'X', // trivial with BS: the conflict
                _ => '?',
            };
            row.push(ch);
        }
        format!("phi={phi:+.2} |{row}|")
    }).collect();
    for r in rows { println!("{r}"); }
    println!("legend: '#' C=1&BS, ' ' C=0&noBS, 'X' C=0&BS, '!' C=1&noBS, '.' unresolved-gap<0.03");
}

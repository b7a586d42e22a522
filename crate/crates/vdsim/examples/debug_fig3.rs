use vdsim::graph::{AtomSpec, Boundary};
use vdsim::models::{bloch_gap, build_model, default_vacancy_site, ModelParams};
use vdsim::observables::{bond_currents, current_extremum, kirchhoff_residual};
use vdsim::operator::assemble_bath;
use vdsim::spectra::{diagonalize, find_ingap_states};
use vdsim::vds::make_vds;
use std::time::Instant;

fn main() {
    let t0 = Instant::now();
    let p = ModelParams::Haldane {
        nx: 30, ny: 30, m: 0.0, t: 0.1, phi: std::f64::consts::FRAC_PI_2,
        omega_c: 0.0, j: 1.0, bc: Boundary::Periodic,
    };
    let gap = bloch_gap(&p, 90).unwrap();
    println!("gap mid={:+.6} width={:.6}  (analytic 0.519615)", gap.mid, gap.width);
    let bath = build_model(&p).unwrap();
    let v = default_vacancy_site(&p, &bath);
    let vac = bath.remove_site(v).unwrap();
    let es = diagonalize(&assemble_bath(&vac.bath)).unwrap();
    let ingap = find_ingap_states(&es, &gap, 0.01);
    println!("n_ingap = {}", ingap.len());
    let (omega_psi, view) = (ingap[0].0, ingap[0].1.to_vec());
    println!("bs energy = {omega_psi:+.6}");
    let atom = AtomSpec::new(omega_psi, 0.01, v);
    let ds = make_vds(&bath, &atom, &vac, &view).unwrap();
    println!("theta = {:.6} rad (target 0.057 ± 10%)", ds.theta);
    println!("phi   = {:+.6} rad", ds.phi);
    let psi_full = vac.embed(&view).unwrap();
    let field = bond_currents(&bath, &psi_full).unwrap();
    let (i, j_, imax) = current_extremum(&field).unwrap();
    println!("|I|max = {:.6} at edge ({i},{j_}) (target ~0.26 ± 15%)", imax.abs());
    println!("kirchhoff = {:.3e}", kirchhoff_residual(&bath, &field));
    println!("elapsed {:?}", t0.elapsed());
}

use num_complex::Complex64;
use vdsim::graph::{Boundary, SiteId};
use vdsim::models::{bloch_gap, build_model, default_vacancy_site, ModelParams};
use vdsim::operator::{assemble_bath, boundary_element};
use vdsim::spectra::{diagonalize, find_ingap_states};

fn main() {
    for t in [0.1f64, 0.2] {
        let p = ModelParams::Haldane {
            nx: 18, ny: 18, m: 0.0, t, phi: std::f64::consts::FRAC_PI_2,
            omega_c: 0.0, j: 1.0, bc: Boundary::Periodic,
        };
        let gap = bloch_gap(&p, 54).unwrap();
        let bath = build_model(&p).unwrap();
        let v = default_vacancy_site(&p, &bath);
        let vac = bath.remove_site(v).unwrap();
        let es = diagonalize(&assemble_bath(&vac.bath)).unwrap();
        let ingap = find_ingap_states(&es, &gap, 0.01);
        println!("== t={t} gap=({:+.4},{:+.4}) n_ingap={}", gap.lower_edge(), gap.upper_edge(), ingap.len());
        // also show vacancy eigenvalues near the gap
        let near: Vec<String> = es.values().iter().cloned()
            .filter(|&e| e > gap.lower_edge() - 0.1 && e < gap.upper_edge() + 0.1)
            .map(|e| format!("{e:+.4}")).collect();
        println!("levels near gap: {near:?}");
        let (e0, psi) = (ingap[0].0, ingap[0].1.to_vec());
        println!("mode at {e0:+.6}");
        let psi_full = vac.embed(&psi).unwrap();
        // neighbors of v in the original bath
        let mut nn = Vec::new();
        let mut nnn = Vec::new();
        for &(jj, amp) in bath.neighbors(v) {
            let c = psi_full[jj];
            if amp.im.abs() < 1e-12 { nn.push((jj, amp, c)); } else { nnn.push((jj, amp, c)); }
        }
        let mut bd_nn = Complex64::new(0.0, 0.0);
        for &(_, amp, c) in &nn { bd_nn += amp * c; }
        let mut bd_nnn = Complex64::new(0.0, 0.0);
        for &(_, amp, c) in &nnn { bd_nnn += amp * c; }
        println!("NN neighbors:");
        for (jj, amp, c) in &nn {
            println!("  site {jj}: J={:+.3}{:+.3}i  psi={:.4} arg {:+.3}", amp.re, amp.im, c.norm(), c.arg());
        }
        println!("NNN ring:");
        for (jj, amp, c) in &nnn {
            println!("  site {jj}: J={:+.3}{:+.3}i  psi={:.4} arg {:+.3}", amp.re, amp.im, c.norm(), c.arg());
        }
        println!("bd_nn = {bd_nn:.5}, bd_nnn = {bd_nnn:.5}, total={:.5}", bd_nn + bd_nnn);
        let bd = boundary_element(&bath, &vac, &psi).unwrap();
        println!("boundary_element = {bd:.5}  |bd|={:.5}", bd.norm());
        let _ = SiteId(0);
    }
}

use std::time::Instant;
use vdsim::config::ScenarioConfig;
use vdsim::scenarios::run;

fn main() {
    let t0 = Instant::now();
    let cfg = ScenarioConfig::from_toml(
        r#"
        schema_version = 1
        scenario = "haldane-vds"
        workers = 8
        [model]
        variant = "haldane"
        nx = 30
        ny = 30
        m = 0.0
        t = 0.1
        phi = 1.5707963267948966
        [[atoms]]
        g = 0.01
        cell = [15, 15]
        sub = "a"
        [contrast]
        m = 1.0392304845413265
        "#,
    )
    .unwrap();
    let dir = tempfile::tempdir().unwrap();
    let rec = run(&cfg, dir.path()).unwrap();
    println!("{}", serde_json::to_string_pretty(&rec.summary).unwrap());
    println!("elapsed {:?}", t0.elapsed());
}

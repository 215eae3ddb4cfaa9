//! Runs one certification and dumps the intermediate enclosures.
//!
//! `cargo run --release --example certify_detail -- 5 250`

use ngon_cert::certify::{certify, CertifyConfig};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<usize>().expect("integer argument"));
    let n = args.next().unwrap_or(5);
    let m = args.next().unwrap_or(60);
    match certify(&CertifyConfig::new(n, m)) {
        Ok(r) => {
            print!("{}", r.to_text());
            let j = r.to_json();
            println!("{}", serde_json::to_string_pretty(&j["eigen"]).expect("json"));
            println!("{}", serde_json::to_string_pretty(&j["material"]).expect("json"));
            println!("mode errors {}", j["mode_errors"]);
            println!("timings {}", j["timings"]);
        }
        Err(e) => println!("error: {e}"),
    }
}

//! Finite spectra, comparison maps and the symbolic integral spectrum.

use filtc2::shell::parse_symbolic_set;
use filtc2::spectrum::{atlas_datm2, atlas_dtm2, compare, IntPoint, IntegralSpectrum};

fn main() {
    let d = atlas_datm2();
    println!("{} has {} points and {} closed subsets", d.name, d.points.len(), d.closed_subsets().len());
    println!("closure of Ms: {:?}", d.closure("Ms").unwrap());
    let t = atlas_dtm2();
    println!("{} points: {:?}", t.name, t.points);
    for p in ["M", "L", "N", "Ms"] {
        println!("DATM2->DTM2 sends {p} to {}", compare("DATM2->DTM2", p).unwrap());
    }

    let z = IntegralSpectrum::real_algebraic();
    println!("closure of m(3): {}", z.closure(IntPoint::m(3).unwrap()));
    for text in ["{N, Ns, m(3)}", "{e(3)}", "{P0, N, Ns, e(all), m(all)}", "{P0, e(all), m(all)}"] {
        let s = parse_symbolic_set(text).unwrap();
        println!("{text} closed: {}", z.is_closed(&s));
    }
}

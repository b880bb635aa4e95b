use lattice_harmonics::verify;

fn main() {
    for id in verify::inequality_ids() {
        let start = std::time::Instant::now();
        match verify::calibrate(id, 2000, 1.2, 42) {
            Ok(c) => println!("{id:<22} C={:<12.6} k={:?} ({:.2?})", c.c, c.k, start.elapsed()),
            Err(e) => println!("{id:<22} ERROR: {e} ({:.2?})", start.elapsed()),
        }
    }
}

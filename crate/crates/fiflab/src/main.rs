use std::process::exit;

fn main() {
    // FIFLAB_THREADS caps the internal rayon worker count.
    if let Ok(value) = std::env::var("FIFLAB_THREADS") {
        if let Ok(n) = value.parse::<usize>() {
            if n >= 1 {
                let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
            }
        }
    }
    exit(fiflab::cli::run(std::env::args_os()));
}

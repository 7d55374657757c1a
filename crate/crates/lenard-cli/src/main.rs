fn main() {
    // Die quietly on a closed pipe (`lenard ... | head`) like other Unix
    // filters instead of panicking mid-print.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    std::process::exit(lenard_cli::run(std::env::args_os()));
}

fn main() -> std::process::ExitCode {
    // Die quietly when a downstream pipe closes instead of panicking.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    clti::cli::main()
}

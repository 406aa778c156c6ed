from aslsim.config.settings import RunConfig, SweepSettings, build_run_config, load_run_config

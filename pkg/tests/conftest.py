import hypothesis

hypothesis.settings.register_profile(
    "fraylab", max_examples=25, deadline=None
)
hypothesis.settings.load_profile("fraylab")

# Sphinx configuration for the computable-analysis API docs.
# https://www.sphinx-doc.org/en/master/usage/configuration.html

project = "Computable Analysis"
copyright = "2024, Alan Meeson"  # noqa: A001
author = "Alan Meeson"
release = "0.1.0"

extensions = [
    "sphinx.ext.autodoc",
    "sphinx.ext.mathjax",
    "sphinx_autodoc_typehints",
    "myst_parser",
    "autoapi.extension",
]
templates_path = ["_templates"]
exclude_patterns = []

autoapi_dirs = ["../../src/computable_analysis"]
autoapi_ignore = ["*/__main__.py", "*/__about__.py"]
autoapi_member_order = "bysource"
autodoc_typehints = "description"

html_theme = "sphinx_rtd_theme"
html_static_path = ["_static"]
html_theme_options = {"collapse_navigation": False, "navigation_depth": 3}

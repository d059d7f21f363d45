# -*- coding: utf-8 -*-
#
# pulsevo documentation build configuration file.

import sys
import os

# The local directive extensions live next to this file, pulsevo one level
# up.
sys.path.append(os.path.abspath('.'))
sys.path.insert(0, os.path.abspath('..'))

extensions = [
    'sphinx.ext.todo',
    'sphinx_argparse.ext',
    'sphinx_confmodel.ext',
    'sphinx.ext.autodoc',
]

source_suffix = '.rst'
master_doc = 'index'

project = u'pulsevo'
copyright = u'2026, pulsevo developers'

# The short X.Y version.
version = '0.1'
# The full version, including alpha/beta/rc tags.
release = '0.1.0'

exclude_patterns = ['_build']
pygments_style = 'sphinx'

html_theme = 'sphinx_rtd_theme'
htmlhelp_basename = 'pulsevodoc'

latex_elements = {
}
latex_documents = [
  ('index', 'pulsevo.tex', u'pulsevo Documentation',
   u'pulsevo developers', 'manual'),
]

man_pages = [
    ('index', 'pulsevo', u'pulsevo Documentation',
     [u'pulsevo developers'], 1)
]

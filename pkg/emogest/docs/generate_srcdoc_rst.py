#generate_srcdoc_rst.py
#writes srcdocs/index.rst, one srcdocs/packages/emogest.[pkg].rst per package
#and one reference sheet per module. Run it from the docs directory before
#"sphinx-build"; srcdocs is removed and regenerated on every run.

import os
import shutil

index_top = """.. _source_documentation:

============================
emogest Source Documentation
============================

.. toctree::
   :maxdepth: 3
   :glob:


"""

package_top = """
.. toctree::
    :maxdepth: 3

"""

package_bottom = """
Indices and tables
==================

* :ref:`genindex`
* :ref:`modindex`
* :ref:`search`
"""

ref_sheet_bottom = """
   :members:
   :undoc-members:
   :show-inheritance:
"""

SKIPPED = ('docs', 'test', '__pycache__')


def modules(package_dir):
    """ Module names of a package directory, tests and inits excluded."""
    names = []
    for listing in sorted(os.listdir(package_dir)):
        if listing.endswith('.py') and not listing.startswith('__init__'):
            names.append(listing[:-3])
    return names


def main(docs_dir):
    root = os.path.dirname(os.path.abspath(docs_dir))
    srcdocs = os.path.join(docs_dir, 'srcdocs')
    if os.path.isdir(srcdocs):
        shutil.rmtree(srcdocs)
    os.makedirs(os.path.join(srcdocs, 'packages'))

    with open(os.path.join(srcdocs, 'index.rst'), 'w') as index:
        index.write(index_top)
        for package in sorted(os.listdir(root)):
            package_dir = os.path.join(root, package)
            if package in SKIPPED or not os.path.isdir(package_dir):
                continue
            names = modules(package_dir)
            #only document non-empty packages
            if not names:
                continue

            package_name = 'emogest.' + package
            index.write('   packages/' + package_name + '\n')
            os.makedirs(os.path.join(srcdocs, 'packages', package))

            with open(os.path.join(srcdocs, 'packages', package_name + '.rst'), 'w') as out:
                out.write(package_name + '\n')
                out.write('-' * len(package_name) + '\n')
                out.write(package_top)
                for name in names:
                    out.write('    ' + package + '/' + name + '\n')
                    sheet = os.path.join(srcdocs, 'packages', package, name + '.rst')
                    with open(sheet, 'w') as ref:
                        filename = name + '.py'
                        ref.write('.. index:: ' + filename + '\n\n')
                        ref.write('.. _' + package_name + '.' + filename + ':\n\n')
                        ref.write(filename + '\n')
                        ref.write('+' * len(filename) + '\n\n')
                        ref.write('.. automodule:: ' + package_name + '.' + name)
                        ref.write(ref_sheet_bottom)
                out.write(package_bottom)


if __name__ == '__main__':
    main(os.path.dirname(os.path.abspath(__file__)))

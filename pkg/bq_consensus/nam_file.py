import os


class NamFile(object):
    """
    Class to read a batch name file listing scenario configurations
    and resolve their paths relative to the name file.

        # comment
        SCENARIO
        fig1.json
        star20.json
        END

    Parameters:
    ----------
    :param str nam_file: nam file name
    """
    def __init__(self, nam_file):

        self.scenarios = []
        self.__read_nam_file(nam_file)

    def __read_nam_file(self, nam_file):
        """
        Nam file parser method to collect the scenario paths listed in
        SCENARIO ... END blocks

        Parameters:
            nam_file: (str) name file path
        """
        base = os.path.dirname(os.path.abspath(nam_file))
        block = False
        with open(nam_file) as nam:

            for line in nam:
                line = line.strip()
                if not line or line.startswith("#"):
                    pass

                elif line.lower().startswith('scenario'):
                    block = True

                elif block:
                    if line.lower().startswith('end'):
                        block = False

                    else:
                        self.scenarios.append(os.path.join(base, line))

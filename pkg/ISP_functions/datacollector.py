import pandas as pd

from diracspec.objects.errors import ContractViolation

class DataCollector:
    """
    Table of results (check outcomes, sampled curves, spectra) kept as a pandas DataFrame.

    Args:
        dataFrame (optional): Initial table
    """
    def __init__(self, dataFrame: pd.DataFrame | None = None) -> None:
        self.df: pd.DataFrame | None = dataFrame

    def is_DataFrame(self, dataFrame) -> None:
        """
        Raises ContractViolation when the value is not a DataFrame.
        """
        if not isinstance(dataFrame, pd.DataFrame):
            raise ContractViolation('the collector holds no DataFrame')

    def get_DataFrame(self, dataFrame, convert: bool = False) -> None:
        """
        Replace the table.

        Args:
            dataFrame (required): DataFrame, or a dict of columns when convert is True
            convert (optional): Build the DataFrame from a dict
        """
        if convert:
            dataFrame = pd.DataFrame(dataFrame)
        self.is_DataFrame(dataFrame)
        self.df = dataFrame

    @classmethod
    def from_rows(cls, rows: list[dict]) -> 'DataCollector':
        collector = cls()
        collector.add_rows(rows)
        return collector

    def add_rows(self, rows: list[dict]) -> None:
        """
        Append records; columns missing from earlier rows are filled with NaN.
        """
        if not rows:
            return
        new = pd.DataFrame(rows)
        self.df = new if self.df is None else pd.concat([self.df, new], ignore_index=True)

    def get_DataFrame_csv(self, path: str) -> None:
        self.df = pd.read_csv(path, encoding='utf-8', float_precision='round_trip')

    def max_Abs(self, *columns) -> dict:
        """
        Largest absolute value per column.
        """
        self.is_DataFrame(self.df)
        return {column: float(self.df[column].abs().max()) for column in columns}

    def count(self, column: str, value) -> int:
        """
        Number of rows whose column equals value.
        """
        self.is_DataFrame(self.df)
        return int((self.df[column] == value).sum())

    def save(self, file_name: str, float_format: str = '%.17g') -> str:
        """
        Write the table to <file_name>.csv.

        Args:
            file_name (required): Output path without the .csv extension
            float_format (optional): printf format of floats

        Returns:
            str: Path written
        """
        self.is_DataFrame(self.df)
        path = f'{file_name}.csv'
        self.df.to_csv(path, encoding='utf-8', header=True, index=False, float_format=float_format,
                       lineterminator='\n')
        return path

    def __len__(self) -> int:
        return 0 if self.df is None else len(self.df)

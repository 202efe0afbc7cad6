using System;

namespace Weather
{
    /// <summary>
    /// Converts temperatures between the Celsius and Fahrenheit scales.
    /// </summary>
    public class Temperature
    {
        /// <summary>
        /// Converts a Celsius reading into degrees Fahrenheit.
        /// </summary>
        /// <param name="celsius">Temperature in degrees Celsius.</param>
        /// <returns>The temperature in degrees Fahrenheit.</returns>
        public static double ToFahrenheit(double celsius)
        {
            return celsius * 9.0 / 5.0 + 32.0;
        }

        /// <summary>
        /// Converts a Fahrenheit reading into degrees Celsius.
        /// </summary>
        /// <param name="fahrenheit">Temperature in degrees Fahrenheit.</param>
        /// <returns>The temperature in degrees Celsius.</returns>
        public static double ToCelsius(double fahrenheit)
        {
            // subtract the offset before scaling down
            double shifted = fahrenheit - 32.0;
            return shifted * 5.0 / 9.0;
        }

        public override string ToString()
        {
            return "Temperature";
        }
    }
}
